"""Backend dispatch for the hot kernels.

Two interchangeable implementations exist: a compiled Cython extension
(:mod:`wcauth._speed`) and a pure NumPy fallback
(:mod:`wcauth.kernels.pure`).  At import time the compiled one is chosen
when available; set ``WCAUTH_BACKEND=python`` or ``=compiled`` to force a
choice (forcing an unavailable backend raises immediately rather than
silently degrading).

All samplers take a :class:`numpy.random.Generator`; determinism follows
from the generator state, never from global seeding.
"""

from __future__ import annotations

import os

import numpy as np

from ..errors import ConfigError, DomainError

_BACKEND_NAMES = ("compiled", "python")
_loaded: dict = {}


def load_backend(name: str):
    """Import and cache the implementation module for ``name``."""
    if name not in _BACKEND_NAMES:
        raise ConfigError(
            f"unknown backend {name!r}; expected one of {_BACKEND_NAMES}"
        )
    if name not in _loaded:
        if name == "compiled":
            from wcauth import _speed as impl  # noqa: PLC0415
        else:
            from wcauth.kernels import pure as impl  # noqa: PLC0415
        _loaded[name] = impl
    return _loaded[name]


def _pick_initial():
    forced = os.environ.get("WCAUTH_BACKEND")
    if forced:
        return forced, load_backend(forced)
    try:
        return "compiled", load_backend("compiled")
    except ImportError:
        return "python", load_backend("python")


_active_name, _active = _pick_initial()


def backend_name() -> str:
    """Name of the currently active backend."""
    return _active_name


def set_backend(name: str) -> None:
    """Switch the active backend (mainly for tests and benchmarks)."""
    global _active_name, _active
    _active = load_backend(name)
    _active_name = name


def _check_table(table) -> np.ndarray:
    raw = np.asarray(table)
    if not np.issubdtype(raw.dtype, np.integer):
        raise DomainError("tag table entries must be integers")
    arr = np.ascontiguousarray(raw, dtype=np.uint16)
    if arr.ndim != 2 or arr.size == 0:
        raise DomainError("tag table must be a non-empty 2-D array")
    return arr


def _check_rng(rng) -> np.random.Generator:
    if not isinstance(rng, np.random.Generator):
        raise DomainError("rng must be a numpy.random.Generator")
    return rng


def asu2_scan(table, num_tags: int):
    """Dispatch :func:`wcauth.kernels.pure.asu2_scan`."""
    arr = _check_table(table)
    if num_tags < 1 or arr.shape[0] % num_tags != 0:
        raise DomainError("num_tags must be positive and divide num_keys")
    if int(arr.max()) >= num_tags:
        raise DomainError("table contains a tag outside [0, num_tags)")
    return _active.asu2_scan(arr, num_tags)


def weak_pair_trials(table, num_tags, surviving, threshold, trials, rng):
    """Dispatch :func:`wcauth.kernels.pure.weak_pair_trials`.

    The caller must ensure condition 1 holds for ``table`` (balanced tag
    classes); both backends rely on it for correct sampling.
    """
    arr = _check_table(table)
    num_keys = arr.shape[0]
    if num_tags < 1 or num_keys % num_tags != 0:
        raise DomainError("num_tags must be positive and divide num_keys")
    if not 1 <= surviving <= num_keys:
        raise DomainError("surviving must lie in [1, num_keys]")
    if threshold < 0 or trials < 0:
        raise DomainError("threshold and trials must be non-negative")
    return _active.weak_pair_trials(
        arr, num_tags, surviving, threshold, trials, _check_rng(rng)
    )


def partition_trials(survivors, good_whole, frac_num, frac_den, trials, rng):
    """Dispatch :func:`wcauth.kernels.pure.partition_trials`."""
    if survivors < 1:
        raise DomainError("survivors must be positive")
    if not 0 <= good_whole <= survivors:
        raise DomainError("good_whole must lie in [0, survivors]")
    if frac_den < 1 or not 0 <= frac_num < frac_den:
        raise DomainError("fractional part must satisfy 0 <= num < den")
    if max(frac_num, frac_den) > 2**53:
        raise DomainError("fraction terms too large for exact float compare")
    if trials < 0:
        raise DomainError("trials must be non-negative")
    return _active.partition_trials(
        survivors, good_whole, frac_num, frac_den, trials, _check_rng(rng)
    )


def salted_certain_trials(
    num_keys, class_size, surviving, cap_num, cap_den, trials, rng
):
    """Dispatch :func:`wcauth.kernels.pure.salted_certain_trials`."""
    if num_keys < 1 or not 1 <= class_size <= num_keys:
        raise DomainError("class_size must lie in [1, num_keys]")
    if not 1 <= surviving <= num_keys:
        raise DomainError("surviving must lie in [1, num_keys]")
    if cap_num < 0 or cap_den < 1:
        raise DomainError("cap must be a non-negative fraction")
    if max(cap_num, cap_den) > 2**53 or cap_num * class_size > 2**62:
        raise DomainError("cap terms too large for exact float compare")
    if trials < 0:
        raise DomainError("trials must be non-negative")
    return _active.salted_certain_trials(
        num_keys, class_size, surviving, cap_num, cap_den, trials,
        _check_rng(rng),
    )
