"""Ground sets, bit-indexed subsets, and level-r intersections of subset families.

The level-r operator of a family (S_1, ..., S_K) at an index set U takes the
union, over all r-element subsets U' of U, of the intersection of the S_k with
k in U'.  Level 1 is the plain union, level |U| the plain intersection, and
the levels shrink as r grows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import GroundMismatchError, ParameterError

MAX_GROUND = 64  # masks stay one machine word
MAX_FAMILY = 16  # r-subset enumeration stays bounded


@dataclass(frozen=True)
class GroundSet:
    """A finite universe of `size` elements, optionally labeled."""

    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.size, int) or not 1 <= self.size <= MAX_GROUND:
            raise ParameterError(f"ground size must be in 1..{MAX_GROUND}")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != self.size:
                raise ParameterError("labels length must equal ground size")
            if len(set(self.labels)) != self.size:
                raise ParameterError("labels must be distinct")

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def index(self, label: str) -> int:
        if self.labels is None:
            raise ParameterError("ground set has no labels")
        try:
            return self.labels.index(label)
        except ValueError:
            raise ParameterError(f"unknown label {label!r}") from None

    def subset(self, members: Iterable[int]) -> "ElementSet":
        mask = 0
        for m in members:
            if not 0 <= m < self.size:
                raise ParameterError(f"element {m} outside ground of size {self.size}")
            mask |= 1 << m
        return ElementSet(self, mask)

    def subset_of_labels(self, names: Iterable[str]) -> "ElementSet":
        return self.subset(self.index(n) for n in names)

    def empty(self) -> "ElementSet":
        return ElementSet(self, 0)

    def full(self) -> "ElementSet":
        return ElementSet(self, self.full_mask)


@dataclass(frozen=True)
class ElementSet:
    """A subset of a ground set, stored as a bit mask."""

    ground: GroundSet
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask <= self.ground.full_mask:
            raise ParameterError("mask outside ground set range")

    def _same_ground(self, other: "ElementSet") -> None:
        if self.ground != other.ground:
            raise GroundMismatchError("element sets built over different grounds")

    def __or__(self, other: "ElementSet") -> "ElementSet":
        self._same_ground(other)
        return ElementSet(self.ground, self.mask | other.mask)

    def __and__(self, other: "ElementSet") -> "ElementSet":
        self._same_ground(other)
        return ElementSet(self.ground, self.mask & other.mask)

    def __sub__(self, other: "ElementSet") -> "ElementSet":
        self._same_ground(other)
        return ElementSet(self.ground, self.mask & ~other.mask)

    def __le__(self, other: "ElementSet") -> bool:
        self._same_ground(other)
        return self.mask & ~other.mask == 0

    def __contains__(self, element: int) -> bool:
        return 0 <= element < self.ground.size and self.mask >> element & 1 == 1

    def __len__(self) -> int:
        return self.mask.bit_count()

    def is_empty(self) -> bool:
        return self.mask == 0

    def members(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.ground.size) if self.mask >> i & 1)

    def member_labels(self) -> tuple[str, ...]:
        return tuple(self.ground.label(i) for i in self.members())


@dataclass(frozen=True)
class SubsetFamily:
    """An ordered family (S_1, ..., S_K) of subsets of one ground set."""

    ground: GroundSet
    sets: tuple[ElementSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(self.sets))
        if not 1 <= len(self.sets) <= MAX_FAMILY:
            raise ParameterError(f"family size must be in 1..{MAX_FAMILY}")
        for s in self.sets:
            if s.ground != self.ground:
                raise GroundMismatchError("family member over a different ground")

    @property
    def size(self) -> int:
        return len(self.sets)

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(s.mask for s in self.sets)


def _check_indices(family: SubsetFamily, indices: Iterable[int]) -> tuple[int, ...]:
    """Validate 1-based member indices and return them 0-based, sorted."""
    idx = sorted(set(indices))
    if not idx:
        raise ParameterError("index set must be nonempty")
    if idx[0] < 1 or idx[-1] > family.size:
        raise ParameterError(f"indices must lie in 1..{family.size}, got {idx}")
    return tuple(i - 1 for i in idx)


def _level_mask(masks: Sequence[int], positions: Sequence[int], r: int) -> int:
    """Union over r-subsets of `positions` of the intersection of their masks."""
    out = 0
    for combo in itertools.combinations(positions, r):
        acc = masks[combo[0]]
        for p in combo[1:]:
            acc &= masks[p]
        out |= acc
    return out


def intersect_level(family: SubsetFamily, indices: Iterable[int], r: int) -> ElementSet:
    """Level-r intersection of the family members named by 1-based `indices`.

    Returns the union over all r-element subsets of `indices` of the
    intersection of the corresponding family sets.  Direct enumeration is
    used on purpose; the family-size cap keeps it at most a few thousand
    terms and the result easy to audit.
    """
    pos = _check_indices(family, indices)
    if not 1 <= r <= len(pos):
        raise ParameterError(f"level must be in 1..{len(pos)}, got {r}")
    return ElementSet(family.ground, _level_mask(family.masks, pos, r))


def _prefix_extended_masks(masks: Sequence[int], cutoff: int, count: int) -> list[int]:
    out = list(masks[:cutoff])
    for r in range(cutoff + 1, count + 1):
        out.append(masks[r - 1] | _level_mask(masks, range(r), cutoff + 1))
    return out


def prefix_extended_family(
    family: SubsetFamily, cutoff: int, count: int
) -> SubsetFamily:
    """The family (G_1, ..., G_count) that augments late members by prefix levels.

    G_r = S_r for r <= cutoff, and for r > cutoff G_r is S_r unioned with the
    level-(cutoff+1) intersection of the first r members.  Requires
    0 < cutoff < count <= family size.
    """
    _check_cutoff(family, cutoff, count)
    ext = _prefix_extended_masks(family.masks, cutoff, count)
    return SubsetFamily(
        family.ground, tuple(ElementSet(family.ground, m) for m in ext)
    )


def _check_cutoff(family: SubsetFamily, cutoff: int, count: int) -> None:
    if not 0 < cutoff < count <= family.size:
        raise ParameterError(
            f"need 0 < cutoff < count <= {family.size}, got cutoff={cutoff} count={count}"
        )


def _prefix_identity_masks(masks: Sequence[int], cutoff: int, count: int) -> bool:
    """Mask-level core of prefix_extension_identity; no validation."""
    ext = _prefix_extended_masks(masks, cutoff, count)
    positions = range(count)
    for r in range(1, count + 1):
        lhs = _level_mask(ext, positions, r)
        if r <= cutoff:
            rhs = _level_mask(masks, positions, r)
        else:
            rhs = _level_mask(masks, range(count - r + cutoff + 1), cutoff + 1)
        if lhs != rhs:
            return False
    return True


def prefix_extension_identity(
    family: SubsetFamily, cutoff: int, count: int
) -> bool:
    """Check the closed form for the levels of the prefix-extended family.

    True iff, with G = prefix_extended_family(family, cutoff, count), the
    level-r set of G over the first `count` indices equals the level-r set of
    the original family for r <= cutoff, and equals the level-(cutoff+1) set
    of the first (count - r + cutoff + 1) original members for r > cutoff.
    Both sides are computed independently from the definitions.
    """
    _check_cutoff(family, cutoff, count)
    return _prefix_identity_masks(family.masks, cutoff, count)
