# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: certification scans and Monte Carlo inner loops.

Mirrors :mod:`wcauth.kernels.pure`.  Random numbers come straight from a
NumPy ``BitGenerator`` through its C interface, one ``next_double`` per
uniform draw; the bounded-integer draws use ``floor(u * bound)``, whose
bias (at most ``bound / 2**53``) is far below anything the statistical
tests can resolve at desk scale.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.stdint cimport int64_t, uint16_t
from numpy.random cimport bitgen_t

import numpy as np


cdef bitgen_t *_get_bitgen(object rng) except NULL:
    cdef const char *name = "BitGenerator"
    capsule = rng.bit_generator.capsule
    if not PyCapsule_IsValid(capsule, name):
        raise ValueError("rng does not expose a BitGenerator capsule")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, name)


def asu2_scan(const uint16_t[:, ::1] table, Py_ssize_t num_tags):
    """See :func:`wcauth.kernels.pure.asu2_scan` (identical output)."""
    cdef Py_ssize_t num_keys = table.shape[0]
    cdef Py_ssize_t num_messages = table.shape[1]
    cdef int64_t cell = num_keys // num_tags
    cdef Py_ssize_t cells = num_tags * num_tags

    cdef int64_t[::1] cnt = np.zeros(cells, dtype=np.int64)
    cdef int64_t[::1] stamp = np.full(cells, -1, dtype=np.int64)
    cdef int64_t epoch = 0

    cdef Py_ssize_t c1_m = -1, c1_t = -1
    cdef int64_t c1_count = -1
    cdef Py_ssize_t m, t, k, m1, m2, idx
    cdef int64_t observed

    for m in range(num_messages):
        epoch += 1
        for k in range(num_keys):
            idx = table[k, m]
            if stamp[idx] != epoch:
                stamp[idx] = epoch
                cnt[idx] = 0
            cnt[idx] += 1
        for t in range(num_tags):
            observed = cnt[t] if stamp[t] == epoch else 0
            if observed != cell:
                c1_m = m
                c1_t = t
                c1_count = observed
                break
        if c1_m >= 0:
            break

    cdef int64_t worst = 0, local_max
    cdef Py_ssize_t w_m1 = -1, w_t1 = -1, w_m2 = -1, w_t2 = -1
    for m1 in range(num_messages):
        for m2 in range(m1 + 1, num_messages):
            epoch += 1
            local_max = 0
            for k in range(num_keys):
                idx = table[k, m1] * num_tags + table[k, m2]
                if stamp[idx] != epoch:
                    stamp[idx] = epoch
                    cnt[idx] = 0
                cnt[idx] += 1
                if cnt[idx] > local_max:
                    local_max = cnt[idx]
            if local_max > worst:
                worst = local_max
                # lowest tag-pair index achieving the new maximum
                for idx in range(cells):
                    if stamp[idx] == epoch and cnt[idx] == local_max:
                        w_m1 = m1
                        w_t1 = idx // num_tags
                        w_m2 = m2
                        w_t2 = idx % num_tags
                        break

    return (c1_m, c1_t, int(c1_count), int(worst), w_m1, w_t1, w_m2, w_t2)


def weak_pair_trials(const uint16_t[:, ::1] table, Py_ssize_t num_tags,
                     Py_ssize_t surviving, Py_ssize_t threshold,
                     Py_ssize_t trials, object rng):
    """See :func:`wcauth.kernels.pure.weak_pair_trials`.

    This version draws the elimination literally: a partial Fisher-Yates
    shuffle picks the ``surviving - 1`` other survivors, and the class
    count is read off the actual tag table (``num_tags`` is unused; it is
    kept for signature parity with the fallback, which needs it).
    """
    cdef Py_ssize_t num_keys = table.shape[0]
    cdef Py_ssize_t num_messages = table.shape[1]
    cdef bitgen_t *bg = _get_bitgen(rng)

    # Values 0..num_keys-2 index the non-true keys; the partial shuffle
    # leaves a permutation of the same values, so no per-trial reset.
    cdef int64_t[::1] pool = np.arange(num_keys - 1, dtype=np.int64)

    cdef Py_ssize_t hits = 0, trial, j, pick, true_key, m, key
    cdef int64_t tmp, x
    cdef uint16_t target

    lock = rng.bit_generator.lock
    with lock:
        for trial in range(trials):
            m = <Py_ssize_t>(bg.next_double(bg.state) * num_messages)
            true_key = <Py_ssize_t>(bg.next_double(bg.state) * num_keys)
            target = table[true_key, m]
            x = 1
            for j in range(surviving - 1):
                pick = j + <Py_ssize_t>(
                    bg.next_double(bg.state) * (num_keys - 1 - j)
                )
                tmp = pool[j]
                pool[j] = pool[pick]
                pool[pick] = tmp
                key = pool[j]
                if key >= true_key:
                    key += 1
                if table[key, m] == target:
                    x += 1
            if x <= threshold:
                hits += 1
    return hits


def partition_trials(Py_ssize_t survivors, Py_ssize_t good_whole,
                     int64_t frac_num, int64_t frac_den,
                     Py_ssize_t trials, object rng):
    """See :func:`wcauth.kernels.pure.partition_trials` (identical output)."""
    cdef bitgen_t *bg = _get_bitgen(rng)
    cdef Py_ssize_t successes = 0, trial, pos
    cdef double u1, u2

    lock = rng.bit_generator.lock
    with lock:
        for trial in range(trials):
            u1 = bg.next_double(bg.state)
            u2 = bg.next_double(bg.state)
            pos = <Py_ssize_t>(u1 * survivors)
            if pos < good_whole:
                successes += 1
            elif pos == good_whole and u2 * frac_den < frac_num:
                successes += 1
    return successes


def salted_certain_trials(Py_ssize_t num_keys, Py_ssize_t class_size,
                          Py_ssize_t surviving, int64_t cap_num,
                          int64_t cap_den, Py_ssize_t trials, object rng):
    """See :func:`wcauth.kernels.pure.salted_certain_trials`."""
    cdef bitgen_t *bg = _get_bitgen(rng)
    cdef Py_ssize_t successes = 0, trial, scanned
    cdef int64_t x, good
    cdef double u

    lock = rng.bit_generator.lock
    with lock:
        for trial in range(trials):
            x = 1
            good = surviving - 1
            for scanned in range(class_size - 1):
                u = bg.next_double(bg.state)
                if u * (num_keys - 1 - scanned) < good:
                    x += 1
                    good -= 1
            u = bg.next_double(bg.state)
            if u * (x * cap_den) < cap_num:
                successes += 1
    return successes
