"""Strongly universal hash families and their certification.

A family here is a finite set of hash functions ``h_k : messages -> tags``
indexed by a key ``k``.  The property that makes such a family useful for
one-time message authentication is epsilon-almost-strong-universality
(ASU2):

* condition 1: for every message ``m`` and tag ``t``, exactly
  ``|keys| / |tags|`` keys map ``m`` to ``t``;
* condition 2: for every pair of distinct messages ``m1 != m2`` and every
  tag pair ``(t1, t2)``, at most ``epsilon * |keys| / |tags|`` keys map
  ``m1`` to ``t1`` and ``m2`` to ``t2``.

Condition 1 makes a single observed tag carry no information about the
next tag; condition 2 caps an attacker's substitution probability at
``epsilon``.  :func:`verify_asu2` checks both conditions by exhaustive
enumeration and returns a certificate with explicit counterexamples when
they fail.

Concrete families are desk scale (the full tag table fits in memory).
Deployment-scale parameter accounting, where key counts like ``2**2176``
never materialize, is handled by :func:`wc_key_length` and by the
analytic machinery in :mod:`wcauth.bounds`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import BudgetError, DomainError

#: Largest number of keys a concrete family may have.
MAX_KEYS = 1 << 26

#: Largest number of tags (tag tables are stored as uint16).
MAX_TAGS = 1 << 16

#: Largest tag-table size (keys * messages) that will be materialized.
MAX_TABLE_ENTRIES = 1 << 26

#: Work budget for exhaustive certification: keys * messages**2.
MAX_VERIFY_WORK = 10**9


def as_fraction(value) -> Fraction:
    """Convert ``value`` (Fraction, int, float, or ``"num/den"``) exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    raise DomainError(f"cannot interpret {value!r} as an exact fraction")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class HashFamily:
    """A concrete keyed hash family with a materializable tag table.

    Parameters
    ----------
    num_keys, num_messages, num_tags:
        Sizes of the key, message, and tag spaces.  Keys, messages, and
        tags are the integers ``0 .. size-1``.
    epsilon:
        The substitution bound this family claims to satisfy.  It is a
        claim until :func:`verify_asu2` certifies it.
    evaluator:
        Callable ``(key, message) -> tag`` used when no table is cached.
    spec:
        JSON-serializable description used for (de)serialization and for
        deciding whether two family objects denote the same family.
    """

    def __init__(
        self,
        num_keys: int,
        num_messages: int,
        num_tags: int,
        epsilon: Fraction,
        evaluator: Callable[[int, int], int],
        spec: dict,
        table: Optional[np.ndarray] = None,
    ):
        if num_keys < 1 or num_messages < 1 or num_tags < 1:
            raise DomainError("family sizes must be positive")
        if num_keys > MAX_KEYS:
            raise BudgetError(f"num_keys {num_keys} exceeds cap {MAX_KEYS}")
        if num_tags > MAX_TAGS:
            raise BudgetError(f"num_tags {num_tags} exceeds cap {MAX_TAGS}")
        if num_keys % num_tags != 0:
            # Condition 1 needs |keys|/|tags| keys per (message, tag) cell.
            raise DomainError("num_tags must divide num_keys")
        epsilon = as_fraction(epsilon)
        if not Fraction(1, num_tags) <= epsilon <= 1:
            raise DomainError("epsilon must lie in [1/num_tags, 1]")
        self.num_keys = num_keys
        self.num_messages = num_messages
        self.num_tags = num_tags
        self.epsilon = epsilon
        self._evaluator = evaluator
        self.spec = spec
        self._table = table
        self._fingerprint = _spec_fingerprint(spec)

    # -- identity ---------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, HashFamily):
            return NotImplemented
        return self._fingerprint == other._fingerprint

    def __hash__(self):
        return hash(self._fingerprint)

    def __repr__(self):
        kind = self.spec.get("kind", "?")
        return (
            f"HashFamily(kind={kind!r}, keys={self.num_keys}, "
            f"messages={self.num_messages}, tags={self.num_tags}, "
            f"epsilon={self.epsilon})"
        )

    # -- evaluation -------------------------------------------------------

    def eval_tag(self, key: int, message: int) -> int:
        """Return ``h_key(message)``; range-checks both arguments."""
        if not 0 <= key < self.num_keys:
            raise DomainError(f"key {key} outside [0, {self.num_keys})")
        if not 0 <= message < self.num_messages:
            raise DomainError(
                f"message {message} outside [0, {self.num_messages})"
            )
        if self._table is not None:
            return int(self._table[key, message])
        return int(self._evaluator(key, message))

    def tag_table(self) -> np.ndarray:
        """Materialize (and cache) the full ``keys x messages`` tag table."""
        if self._table is None:
            entries = self.num_keys * self.num_messages
            if entries > MAX_TABLE_ENTRIES:
                raise BudgetError(
                    f"tag table with {entries} entries exceeds cap "
                    f"{MAX_TABLE_ENTRIES}"
                )
            self._table = self._build_table()
        return self._table

    def _build_table(self) -> np.ndarray:
        keys = np.arange(self.num_keys)
        table = np.empty((self.num_keys, self.num_messages), dtype=np.uint16)
        for m in range(self.num_messages):
            table[:, m] = [self._evaluator(int(k), m) for k in keys]
        return table

    @property
    def keys_per_tag(self) -> int:
        """Size ``|keys| / |tags|`` of each condition-1 cell."""
        return self.num_keys // self.num_tags

    def forgery_cell_cap(self) -> Fraction:
        """Condition-2 ceiling ``epsilon * |keys| / |tags|`` (exact)."""
        return self.epsilon * self.num_keys / self.num_tags


def _spec_fingerprint(spec: dict) -> tuple:
    """Stable identity for a family spec; hashes bulky table payloads."""
    if spec.get("kind") == "table":
        rows = spec["tags"]
        digest = hashlib.sha256(repr(rows).encode()).hexdigest()
        return ("table", spec["num_tags"], str(spec["epsilon"]), digest)
    return tuple(sorted((k, str(v)) for k, v in spec.items()))


class _AffineFamily(HashFamily):
    def _build_table(self) -> np.ndarray:
        p = self.spec["p"]
        a = np.repeat(np.arange(p, dtype=np.int64), p)
        b = np.tile(np.arange(p, dtype=np.int64), p)
        messages = np.arange(p, dtype=np.int64)
        table = (a[:, None] * messages[None, :] + b[:, None]) % p
        return table.astype(np.uint16)


def build_affine_family(p: int) -> HashFamily:
    """Build the family ``h_(a,b)(m) = (a*m + b) mod p`` over a prime ``p``.

    Keys are pairs ``(a, b)`` with ``a, b in 0..p-1``, flattened to the
    index ``a*p + b``.  The family has ``p**2`` keys, ``p`` messages,
    ``p`` tags, and is ``1/p``-ASU2: fixing tags at two distinct messages
    pins down ``(a, b)`` uniquely, so every condition-2 cell holds exactly
    one key.

    Raises
    ------
    DomainError
        If ``p`` is not prime (the two-point interpolation argument needs
        a field).
    BudgetError
        If ``p**2`` exceeds the concrete-family key cap.
    """
    if not _is_prime(p):
        raise DomainError(f"p={p} is not prime")
    if p * p > MAX_KEYS:
        raise BudgetError(f"p**2 = {p * p} exceeds key cap {MAX_KEYS}")

    def evaluator(key: int, message: int) -> int:
        a, b = divmod(key, p)
        return (a * message + b) % p

    return _AffineFamily(
        num_keys=p * p,
        num_messages=p,
        num_tags=p,
        epsilon=Fraction(1, p),
        evaluator=evaluator,
        spec={"kind": "affine", "p": p},
    )


def build_table_family(
    tags: Sequence[Sequence[int]] | np.ndarray,
    epsilon,
    num_tags: Optional[int] = None,
) -> HashFamily:
    """Build a family from an explicit tag table.

    Parameters
    ----------
    tags:
        Two-dimensional table with one row per key and one column per
        message; entry ``[k][m]`` is ``h_k(m)``.
    epsilon:
        Claimed substitution bound (exact fraction, e.g. ``"1/5"``).
    num_tags:
        Size of the tag space.  Defaults to ``max(tags) + 1``.

    Raises
    ------
    DomainError
        On ragged rows, out-of-range tags, a tag count that does not
        divide the key count, or an epsilon below ``1/num_tags``.
    """
    try:
        arr = np.asarray(tags)
    except ValueError as exc:
        raise DomainError(f"malformed tag table: {exc}") from exc
    if arr.ndim != 2 or arr.size == 0:
        raise DomainError("tag table must be a non-empty 2-D array")
    if not np.issubdtype(arr.dtype, np.integer):
        raise DomainError("tag table entries must be integers")
    if arr.min() < 0:
        raise DomainError("tags must be non-negative")
    top = int(arr.max())
    if num_tags is None:
        num_tags = top + 1
    elif top >= num_tags:
        raise DomainError(f"tag {top} outside [0, {num_tags})")
    num_keys, num_messages = arr.shape
    table = np.ascontiguousarray(arr, dtype=np.uint16)
    spec = {
        "kind": "table",
        "tags": arr.tolist(),
        "num_tags": int(num_tags),
        "epsilon": str(as_fraction(epsilon)),
    }
    return HashFamily(
        num_keys=num_keys,
        num_messages=num_messages,
        num_tags=int(num_tags),
        epsilon=as_fraction(epsilon),
        evaluator=lambda k, m: int(table[k, m]),
        spec=spec,
        table=table,
    )


def build_block_family(num_keys: int, num_tags: int, epsilon) -> HashFamily:
    """Single-message family mapping key ``k`` to tag ``k // (keys/tags)``.

    With only one message, condition 2 is vacuous and condition 1 holds by
    construction, so the family is ``epsilon``-ASU2 for any claimed
    ``epsilon >= 1/num_tags``.  Useful for exercising key-space shapes
    ``(num_keys, num_tags)`` that the affine construction cannot reach.
    """
    if num_keys % num_tags != 0:
        raise DomainError("num_tags must divide num_keys")
    block = num_keys // num_tags
    table = (np.arange(num_keys, dtype=np.int64) // block).reshape(-1, 1)
    return build_table_family(table, epsilon, num_tags=num_tags)


@dataclass(frozen=True)
class FamilyShape:
    """Size-only description of a family for model-level simulations.

    Carries just ``(num_keys, num_tags, epsilon)``; there is no tag table,
    so only strategies that operate on the idealized key-partition model
    can run against a shape.
    """

    num_keys: int
    num_tags: int
    epsilon: Fraction

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        if self.num_keys < 1 or self.num_tags < 1:
            raise DomainError("shape sizes must be positive")
        if self.num_keys % self.num_tags != 0:
            raise DomainError("num_tags must divide num_keys")
        if not Fraction(1, self.num_tags) <= self.epsilon <= 1:
            raise DomainError("epsilon must lie in [1/num_tags, 1]")

    @property
    def keys_per_tag(self) -> int:
        return self.num_keys // self.num_tags

    def forgery_cell_cap(self) -> Fraction:
        return self.epsilon * self.num_keys / self.num_tags


def eval_tag(family: HashFamily, key: int, message: int) -> int:
    """Module-level alias for :meth:`HashFamily.eval_tag`."""
    return family.eval_tag(key, message)


@dataclass(frozen=True)
class Asu2Certificate:
    """Outcome of exhaustive ASU2 verification.

    ``condition1_violation`` is ``(message, tag, observed_count)`` for the
    lexicographically first cell whose key count differs from
    ``|keys|/|tags|``; ``condition2_violation`` is
    ``(m1, t1, m2, t2, observed_count)`` for a cell exceeding
    ``epsilon * |keys| / |tags|``.  ``worst_condition2_count`` is the
    maximum condition-2 cell count over all message pairs (0 when there is
    only one message, the maximum over an empty set).
    """

    holds: bool
    condition1_violation: Optional[tuple[int, int, int]]
    condition2_violation: Optional[tuple[int, int, int, int, int]]
    worst_condition2_count: int


def verify_asu2(family: HashFamily) -> Asu2Certificate:
    """Certify both ASU2 conditions by exhaustive enumeration.

    The scan touches every key for every message pair, so the work grows
    as ``|keys| * |messages|**2``; requests beyond the desk-scale budget
    raise :class:`BudgetError` rather than silently running for hours.
    The condition-2 comparison against ``epsilon * |keys| / |tags|`` is
    done in exact rational arithmetic.
    """
    work = family.num_keys * family.num_messages**2
    if work > MAX_VERIFY_WORK:
        raise BudgetError(
            f"verification work {work} exceeds budget {MAX_VERIFY_WORK}"
        )
    from . import kernels

    table = family.tag_table()
    scan = kernels.asu2_scan(table, family.num_tags)
    c1_m, c1_t, c1_count, worst, w_m1, w_t1, w_m2, w_t2 = scan

    condition1 = None
    if c1_m >= 0:
        condition1 = (c1_m, c1_t, c1_count)

    cap = family.forgery_cell_cap()
    condition2 = None
    if worst > cap:
        condition2 = (w_m1, w_t1, w_m2, w_t2, worst)

    return Asu2Certificate(
        holds=condition1 is None and condition2 is None,
        condition1_violation=condition1,
        condition2_violation=condition2,
        worst_condition2_count=worst,
    )


def wc_key_length(message_bits: int, tag_bits: int) -> int:
    """Key bits consumed per authenticated message, Wegman-Carter style.

    The tree construction hashes ``message_bits`` down to ``tag_bits``
    through repeated compression stages, each keyed independently, giving
    ``tag_bits * 4 * ceil(log2(message_bits))`` key bits total.

    >>> wc_key_length(100000, 32)
    2176
    """
    if message_bits < 2:
        raise DomainError("message_bits must be at least 2")
    if tag_bits < 1:
        raise DomainError("tag_bits must be positive")
    ceil_log2 = (message_bits - 1).bit_length()
    return tag_bits * 4 * ceil_log2


def family_to_json(family: HashFamily | FamilyShape) -> dict:
    """Serialize a family (or shape) to its JSON description."""
    if isinstance(family, FamilyShape):
        return {
            "kind": "shape",
            "num_keys": family.num_keys,
            "num_tags": family.num_tags,
            "epsilon": str(family.epsilon),
        }
    return dict(family.spec)


def family_from_json(spec: dict) -> HashFamily | FamilyShape:
    """Rebuild a family from :func:`family_to_json` output.

    Supported kinds: ``affine`` (``{"kind": "affine", "p": 5}``),
    ``table`` (``{"kind": "table", "tags": [[...]], "num_tags": n,
    "epsilon": "1/5"}``), ``block``, and ``shape``.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("family spec must be an object with a 'kind'")
    kind = spec["kind"]
    try:
        if kind == "affine":
            return build_affine_family(int(spec["p"]))
        if kind == "table":
            return build_table_family(
                spec["tags"], spec["epsilon"], num_tags=spec.get("num_tags")
            )
        if kind == "block":
            return build_block_family(
                int(spec["num_keys"]), int(spec["num_tags"]), spec["epsilon"]
            )
        if kind == "shape":
            return FamilyShape(
                num_keys=int(spec["num_keys"]),
                num_tags=int(spec["num_tags"]),
                epsilon=as_fraction(spec["epsilon"]),
            )
    except KeyError as exc:
        raise DomainError(f"family spec missing field {exc}") from exc
    raise DomainError(f"unknown family kind {kind!r}")
