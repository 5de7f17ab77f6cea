"""Eavesdropper key knowledge and guaranteed-forgery search.

An eavesdropper's state of knowledge about the authentication key is a
subset of the family's key space: the keys she has not (yet) ruled out.
:class:`KeySet` stores such a subset as a bit mask over key indices.
Knowledge comes from two sources that compose by intersection:

* side information that eliminates keys outright
  (:func:`random_elimination` models it as a uniform surviving subset
  that always contains the true key);
* an observed message/tag pair, which eliminates every key hashing the
  message elsewhere (:func:`constraint_set`).

Once the surviving set maps some other message to a single common tag,
the forgery of that message is *certain*, not probabilistic; the
functions at the bottom of the module locate such messages and quantify
how close a given message comes to enabling them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import DomainError, FamilyMismatchError
from .families import HashFamily, as_fraction


def _mask_from_indices(indices, num_keys: int) -> int:
    bits = np.zeros(num_keys, dtype=np.uint8)
    bits[np.asarray(indices, dtype=np.int64)] = 1
    packed = np.packbits(bits, bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _indices_from_mask(mask: int, num_keys: int) -> np.ndarray:
    raw = mask.to_bytes((num_keys + 7) // 8, "little")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    return np.nonzero(bits[:num_keys])[0].astype(np.int64)


@dataclass(frozen=True)
class KeySet:
    """A subset of a family's key indices, stored as a bit mask."""

    family: HashFamily
    mask: int

    def __post_init__(self):
        if self.mask < 0:
            raise DomainError("key-set mask must be non-negative")
        if self.mask >> self.family.num_keys:
            raise DomainError("key-set mask has bits beyond the key space")

    @classmethod
    def full(cls, family: HashFamily) -> "KeySet":
        return cls(family, (1 << family.num_keys) - 1)

    @classmethod
    def from_indices(cls, family: HashFamily, indices: Iterable[int]) -> "KeySet":
        idx = np.asarray(list(indices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= family.num_keys):
            raise DomainError("key index outside the family's key space")
        return cls(family, _mask_from_indices(idx, family.num_keys))

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, key: int) -> bool:
        return 0 <= key < self.family.num_keys and bool(self.mask >> key & 1)

    def indices(self) -> np.ndarray:
        """Member key indices in increasing order."""
        return _indices_from_mask(self.mask, self.family.num_keys)

    def to_json(self) -> list[int]:
        """Sorted list of member key indices."""
        return [int(k) for k in self.indices()]

    @classmethod
    def from_json(cls, family: HashFamily, data: list[int]) -> "KeySet":
        return cls.from_indices(family, data)


def constraint_set(family: HashFamily, message: int, tag: int) -> KeySet:
    """Keys consistent with having produced ``tag`` for ``message``."""
    if not 0 <= message < family.num_messages:
        raise DomainError(f"message {message} outside the message space")
    if not 0 <= tag < family.num_tags:
        raise DomainError(f"tag {tag} outside the tag space")
    column = family.tag_table()[:, message]
    matching = np.nonzero(column == tag)[0]
    return KeySet(family, _mask_from_indices(matching, family.num_keys))


def intersect(a: KeySet, b: KeySet) -> KeySet:
    """Combine two pieces of knowledge about the same family's key."""
    if a.family != b.family:
        raise FamilyMismatchError(
            "cannot intersect key sets over different families"
        )
    return KeySet(a.family, a.mask & b.mask)


def random_elimination(
    family: HashFamily, true_key: int, r, rng: np.random.Generator
) -> KeySet:
    """Surviving keys after side information of strength ``r``.

    Models an eavesdropper who has ruled out all but a fraction ``r`` of
    the key space: the result is a uniformly random subset of
    ``round(r * num_keys)`` keys (round half to even) that always
    contains ``true_key``.

    Raises
    ------
    DomainError
        If ``r`` is outside ``(0, 1]`` or rounds to an empty set.
    """
    r = as_fraction(r)
    if not 0 < r <= 1:
        raise DomainError("knowledge fraction r must lie in (0, 1]")
    if not 0 <= true_key < family.num_keys:
        raise DomainError(f"true_key {true_key} outside the key space")
    surviving = round(r * family.num_keys)
    if surviving < 1:
        raise DomainError(
            f"r={r} rounds to an empty surviving set for "
            f"{family.num_keys} keys"
        )
    others = rng.choice(family.num_keys - 1, size=surviving - 1, replace=False)
    others = others + (others >= true_key)
    mask = _mask_from_indices(others, family.num_keys) | (1 << true_key)
    return KeySet(family, mask)


def certain_forgery(surviving: KeySet, message: int) -> Optional[int]:
    """Tag forced for ``message`` by every surviving key, if any.

    Returns the common tag when all surviving keys agree on ``message``
    (a forgery of that message succeeds with certainty), else ``None``.
    """
    family = surviving.family
    if not 0 <= message < family.num_messages:
        raise DomainError(f"message {message} outside the message space")
    idx = surviving.indices()
    if idx.size == 0:
        raise DomainError("surviving key set is empty")
    tags = family.tag_table()[idx, message]
    first = tags[0]
    if np.all(tags == first):
        return int(first)
    return None


def forgeable_messages(
    surviving: KeySet, exclude_message: Optional[int] = None
) -> list[tuple[int, int]]:
    """All ``(message, forced_tag)`` pairs forgeable with certainty.

    ``exclude_message`` drops one message from the scan (typically the
    one already transmitted, which cannot be re-sent as a forgery).
    """
    family = surviving.family
    idx = surviving.indices()
    if idx.size == 0:
        raise DomainError("surviving key set is empty")
    sub = family.tag_table()[idx]
    agree = np.all(sub == sub[0:1, :], axis=0)
    out = []
    for m in np.nonzero(agree)[0]:
        if exclude_message is not None and m == exclude_message:
            continue
        out.append((int(m), int(sub[0, m])))
    return out


@dataclass(frozen=True)
class PartitionProfile:
    """How a message splits a surviving key set into tag classes.

    ``subset_sizes`` maps each tag to the number of surviving keys that
    produce it (absent tags map to zero keys).  A class is *good* when
    its size is between 1 and ``epsilon * num_keys / num_tags``: landing
    in a good class leaves the adversary few enough candidates that a
    certainty-grade substitution becomes available.
    """

    message: int
    subset_sizes: dict[int, int]
    good_tags: tuple[int, ...]
    good_key_count: int

    @property
    def total(self) -> int:
        return sum(self.subset_sizes.values())


def partition_by_message(surviving: KeySet, message: int) -> PartitionProfile:
    """Profile the tag classes ``message`` induces on ``surviving``."""
    family = surviving.family
    if not 0 <= message < family.num_messages:
        raise DomainError(f"message {message} outside the message space")
    idx = surviving.indices()
    if idx.size == 0:
        raise DomainError("surviving key set is empty")
    tags = family.tag_table()[idx, message]
    counts = np.bincount(tags, minlength=family.num_tags)
    cap = _good_class_cap(family)
    sizes = {int(t): int(c) for t, c in enumerate(counts) if c > 0}
    good = tuple(int(t) for t, c in sizes.items() if c <= cap)
    return PartitionProfile(
        message=message,
        subset_sizes=sizes,
        good_tags=good,
        good_key_count=sum(sizes[t] for t in good),
    )


def _good_class_cap(family: HashFamily) -> int:
    # class sizes are integers, so comparing against floor(eps*H/T) is
    # exactly the comparison against the rational cap itself
    cap = family.forgery_cell_cap()
    return cap.numerator // cap.denominator


def craft_influenced_message(
    eve_knowledge: KeySet, exclude: frozenset[int] | set[int] = frozenset()
) -> Optional[int]:
    """Message whose tag classes best suit an adversary with influence.

    Scans every message outside ``exclude`` and returns the one whose
    partition places the most surviving keys into good classes (ties go
    to the smallest message).  Returns ``None`` when no message puts any
    surviving key in a good class, i.e. influence buys nothing.
    """
    family = eve_knowledge.family
    idx = eve_knowledge.indices()
    if idx.size == 0:
        raise DomainError("surviving key set is empty")
    sub = family.tag_table()[idx]
    cap = _good_class_cap(family)
    best_message = None
    best_mass = 0
    for m in range(family.num_messages):
        if m in exclude:
            continue
        counts = np.bincount(sub[:, m], minlength=family.num_tags)
        mass = int(counts[(counts >= 1) & (counts <= cap)].sum())
        if mass > best_mass:
            best_mass = mass
            best_message = m
    return best_message
