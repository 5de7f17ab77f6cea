"""Pure NumPy implementations of the hot kernels.

These mirror the compiled versions in :mod:`wcauth._speed` function for
function.  The certification scan and the partition-attack sampler produce
identical results on both backends; the two elimination samplers draw the
same distributions through a different (vectorized) sequence of RNG calls,
so their outputs agree statistically but not call for call.
"""

from __future__ import annotations

import numpy as np


def asu2_scan(table: np.ndarray, num_tags: int):
    """Exhaustive ASU2 condition scan over a tag table.

    Returns an 8-tuple ``(c1_m, c1_t, c1_count, worst, m1, t1, m2, t2)``:
    the first condition-1 cell (in lexicographic message/tag order) whose
    key count differs from ``num_keys/num_tags`` (or ``-1`` sentinels),
    the largest condition-2 cell count over all message pairs, and the
    cell achieving it (first pair reaching the maximum, lowest tag-pair
    index within it; ``-1`` sentinels when there are no message pairs).
    """
    table = np.asarray(table)
    num_keys, num_messages = table.shape
    cell = num_keys // num_tags

    c1_m, c1_t, c1_count = -1, -1, -1
    for m in range(num_messages):
        counts = np.bincount(table[:, m], minlength=num_tags)
        bad = np.nonzero(counts[:num_tags] != cell)[0]
        if bad.size:
            c1_m, c1_t = m, int(bad[0])
            c1_count = int(counts[c1_t])
            break

    worst = 0
    w_m1 = w_t1 = w_m2 = w_t2 = -1
    cols = table.astype(np.int64)
    for m1 in range(num_messages):
        for m2 in range(m1 + 1, num_messages):
            joint = np.bincount(
                cols[:, m1] * num_tags + cols[:, m2],
                minlength=num_tags * num_tags,
            )
            top = int(joint.max())
            if top > worst:
                worst = top
                idx = int(joint.argmax())
                w_m1, w_t1 = m1, idx // num_tags
                w_m2, w_t2 = m2, idx % num_tags
    return (c1_m, c1_t, c1_count, worst, w_m1, w_t1, w_m2, w_t2)


def weak_pair_trials(
    table: np.ndarray,
    num_tags: int,
    surviving: int,
    threshold: int,
    trials: int,
    rng: np.random.Generator,
) -> int:
    """Count trials where the observed-tag class retains few enough keys.

    Each trial eliminates keys down to a uniform ``surviving``-subset that
    contains the true key, then measures ``X``, the number of survivors
    mapping a random message to the true key's tag.  A trial hits when
    ``X <= threshold``.

    Requires condition 1 (every tag class in every column has size
    ``num_keys/num_tags``); under it, ``X`` does not depend on which
    message or tag was observed, so the class membership is sampled as a
    without-replacement urn over one class instead of materializing the
    elimination, one Bernoulli column per class slot across all trials.
    """
    num_keys = table.shape[0]
    class_size = num_keys // num_tags
    x = np.ones(trials, dtype=np.int64)
    good = np.full(trials, surviving - 1, dtype=np.int64)
    for scanned in range(class_size - 1):
        remaining = num_keys - 1 - scanned
        u = rng.random(trials)
        take = u * remaining < good
        x += take
        good -= take
    return int(np.count_nonzero(x <= threshold))


def partition_trials(
    survivors: int,
    good_whole: int,
    frac_num: int,
    frac_den: int,
    trials: int,
    rng: np.random.Generator,
) -> int:
    """Sample the idealized message-partition attack.

    The true key sits at a uniform position among ``survivors`` surviving
    keys, of which the first ``good_whole + frac_num/frac_den`` (a
    possibly fractional count, realized with a boundary Bernoulli draw)
    lie in certainty-granting subsets.  Consumes exactly two uniform
    doubles per trial in the same order as the compiled kernel, so both
    backends return identical counts for identical generator states.
    """
    draws = rng.random(2 * trials)
    pos = (draws[0::2] * survivors).astype(np.int64)
    boundary = draws[1::2]
    hit = (pos < good_whole) | (
        (pos == good_whole) & (boundary * frac_den < frac_num)
    )
    return int(np.count_nonzero(hit))


def salted_certain_trials(
    num_keys: int,
    class_size: int,
    surviving: int,
    cap_num: int,
    cap_den: int,
    trials: int,
    rng: np.random.Generator,
) -> int:
    """Sample the committed (salted) attack with post-commitment guessing.

    Each trial draws ``X``, the surviving-key count of the true key's tag
    class (same urn as :func:`weak_pair_trials`), then succeeds with
    probability ``min(1, cap/X)`` where ``cap = cap_num/cap_den`` is the
    certainty-cell ceiling: the adversary already committed to a message
    and now picks the likeliest tag consistent with her knowledge.
    """
    x = np.ones(trials, dtype=np.int64)
    good = np.full(trials, surviving - 1, dtype=np.int64)
    for scanned in range(class_size - 1):
        remaining = num_keys - 1 - scanned
        u = rng.random(trials)
        take = u * remaining < good
        x += take
        good -= take
    u = rng.random(trials)
    return int(np.count_nonzero(u * (x * cap_den) < cap_num))
