"""Builders for cut-type rate bounds on broadcast-style networks.

A bound is a weighted list of (level, sink-subset) terms.  The same term
list is read twice during instantiation: against the demand family it
produces message-rate coefficients, against the basic-cut family it
produces arc-capacity coefficients.  Keeping one term list for both sides
is what makes the rate/capacity symmetry of these bounds structural rather
than something each builder has to re-establish.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .errors import ParameterError, PreconditionError
from .setcalc import ElementSet, SubsetFamily, _check_indices, _level_mask

MAX_BETA_SET_SIZE = 6
MAX_SEARCH_SINKS = 4

ENUMERATION_RULES = ("csb", "gcsb3", "cor3")


def _format_set(values: Iterable[int]) -> str:
    return "{" + ",".join(str(v) for v in sorted(values)) + "}"


def _validate_split_points(Q) -> tuple:
    qs = sorted(set(Q))
    if any(not isinstance(q, int) or q < 2 for q in qs):
        raise ParameterError("split points must be integers >= 2")
    return tuple(qs)


def alpha(Q, q: int, r: int, r_q: Optional[int] = None) -> Fraction:
    """Chain weight of level r contributed by split point q.

    The default split position is q - 1.  Weights vanish on the split set
    itself and the row for each q sums to 1 at the default position.
    """
    qs = _validate_split_points(Q)
    if q not in qs:
        raise ParameterError(f"{q} is not one of the split points {qs}")
    if r_q is None:
        r_q = q - 1
    if r_q < 1:
        raise ParameterError("split position must be at least 1")
    if not 1 <= r <= r_q:
        raise ParameterError(f"level must be between 1 and {r_q}, got {r}")
    if r in qs:
        return Fraction(0)
    numerator = math.prod(p - 1 for p in qs if p < r) * math.prod(
        p for p in qs if r < p <= r_q
    )
    denominator = r_q * math.prod(p - 1 for p in qs if p <= r_q)
    return Fraction(numerator, denominator)


def beta(Q, r: int) -> Fraction:
    """Unnormalized level weight skipping the split set Q entirely."""
    qs = _validate_split_points(Q)
    if r < 1:
        raise ParameterError("level must be at least 1")
    if not qs:
        return Fraction(1)
    if r in qs:
        return Fraction(0)
    return Fraction(
        math.prod(p - 1 for p in qs if p < r) * math.prod(p for p in qs if p > r)
    )


def alpha_beta_identity(Q, r: int) -> bool:
    """Check that the alpha rows at default splits telescope into beta.

    For r below max(Q) the stacked alpha weights equal
    beta(Q, r) / prod(q - 1) minus the single unit contributed elsewhere,
    and they vanish on Q itself.
    """
    qs = _validate_split_points(Q)
    if not qs:
        raise ParameterError("at least one split point is required")
    if not 1 <= r < max(qs):
        raise ParameterError(f"level must be between 1 and {max(qs) - 1}, got {r}")
    lhs = sum((alpha(qs, q, r) for q in qs if q > r), Fraction(0))
    if r in qs:
        return lhs == 0
    scale = math.prod(q - 1 for q in qs)
    return lhs == beta(qs, r) / scale - 1


@dataclass(frozen=True)
class BoundTerm:
    """One weighted level term; `indices` holds 1-based sink indices."""

    level: int
    indices: frozenset
    weight: Fraction


@dataclass(frozen=True)
class BoundInequality:
    """Canonical weighted term list plus a human-readable origin tag.

    Equality and hashing ignore the provenance, so two builders producing
    the same inequality compare equal regardless of the route taken.
    """

    terms: tuple
    provenance: str = field(default="", compare=False)

    @classmethod
    def build(cls, terms, provenance: str = "") -> "BoundInequality":
        merged: dict = {}
        for t in terms:
            indices = frozenset(t.indices)
            if not indices or any(not isinstance(i, int) or i < 1 for i in indices):
                raise ParameterError("term indices must be positive integers")
            if not 1 <= t.level <= len(indices):
                raise ParameterError(
                    f"level {t.level} is out of range for a set of {len(indices)} indices"
                )
            weight = Fraction(t.weight)
            if weight < 0:
                raise ParameterError("term weights must be nonnegative")
            key = (t.level, indices)
            merged[key] = merged.get(key, Fraction(0)) + weight
        alive = {k: w for k, w in merged.items() if w != 0}
        if not alive:
            raise ParameterError("a bound needs at least one term with positive weight")
        scale_up = math.lcm(*(w.denominator for w in alive.values()))
        units = [int(w * scale_up) for w in alive.values()]
        scale_down = math.gcd(*units)
        ordered = sorted(
            alive.items(),
            key=lambda kv: (len(kv[0][1]), tuple(sorted(kv[0][1])), kv[0][0]),
        )
        final = tuple(
            BoundTerm(level, indices, weight * scale_up / scale_down)
            for (level, indices), weight in ordered
        )
        return cls(final, provenance)


def cutset_bound(U) -> BoundInequality:
    """Plain cut-set bound over the sink set U: one level-1 union term."""
    indices = frozenset(U)
    if not indices:
        raise ParameterError("the sink set must be nonempty")
    return BoundInequality.build(
        [BoundTerm(1, indices, Fraction(1))], provenance=f"csb({_format_set(indices)})"
    )


def gcsb3(i: int, j: int, k: int, variant: str) -> BoundInequality:
    """The four generalized three-sink bounds; the pair {i, j} is the one
    singled out in variants a and c."""
    if len({i, j, k}) != 3 or min(i, j, k) < 1:
        raise ParameterError("three distinct positive sink indices are required")
    full = frozenset((i, j, k))
    pair = frozenset((i, j))
    one = Fraction(1)
    if variant == "a":
        terms = [BoundTerm(1, full, one), BoundTerm(2, pair, one)]
    elif variant == "b":
        terms = [BoundTerm(1, full, one), BoundTerm(2, full, one)]
    elif variant == "c":
        terms = [BoundTerm(1, full, one), BoundTerm(1, pair, one), BoundTerm(3, full, one)]
    elif variant == "d":
        terms = [BoundTerm(1, full, Fraction(2)), BoundTerm(3, full, one)]
    else:
        raise ParameterError(f"unknown variant {variant!r}, expected one of a, b, c, d")
    return BoundInequality.build(terms, provenance=f"gcsb3{variant}({i},{j},{k})")


def beta_bound(U, Q) -> BoundInequality:
    """Level bound with beta weights skipping the split set Q."""
    indices = frozenset(U)
    if not indices:
        raise ParameterError("the sink set must be nonempty")
    if len(indices) > MAX_BETA_SET_SIZE:
        raise ParameterError(
            f"beta weights grow factorially; sink sets are capped at {MAX_BETA_SET_SIZE}"
        )
    qs = _validate_split_points(Q)
    if any(q > len(indices) for q in qs):
        raise ParameterError("split points must lie within {2..|U|}")
    terms = [BoundTerm(r, indices, beta(qs, r)) for r in range(1, len(indices) + 1)]
    return BoundInequality.build(
        terms, provenance=f"cor2({_format_set(indices)}, Q={_format_set(qs)})"
    )


def union_tail_bound(U, m: int) -> BoundInequality:
    """m copies of the union term plus all levels above m; the scaled form
    of the beta bound at consecutive split points 2..m."""
    indices = frozenset(U)
    if not indices:
        raise ParameterError("the sink set must be nonempty")
    if not 1 <= m <= len(indices):
        raise ParameterError(f"m must be between 1 and {len(indices)}, got {m}")
    terms = [BoundTerm(1, indices, Fraction(m))]
    terms.extend(BoundTerm(r, indices, Fraction(1)) for r in range(m + 1, len(indices) + 1))
    return BoundInequality.build(
        terms, provenance=f"cor3({_format_set(indices)}, m={m})"
    )


def _labelled_extra(family: SubsetFamily, mask: int) -> str:
    return ", ".join(ElementSet(family.ground, mask).member_labels())


def gcsbK(
    G,
    U=None,
    T=None,
    Q=(),
    r_q_map: Optional[Mapping[int, int]] = None,
    *,
    cut_family: SubsetFamily,
    msg_family: SubsetFamily,
) -> BoundInequality:
    """General sink-cover bound: a union term over G, the upper levels of U
    outside the split set Q, and alpha-weighted chain terms over T.

    U defaults to G and T defaults to U.  Validity is checked against the
    given families: the basic-cut union over G must cover the one over U,
    and each split level of U must be contained in the chain level of T on
    both the cut side and the message side.
    """
    if cut_family.size != msg_family.size:
        raise ParameterError("cut and message families must have the same sink count")
    pos_g = _check_indices(cut_family, G)
    ids_g = tuple(p + 1 for p in pos_g)
    ids_u = ids_g if U is None else tuple(p + 1 for p in _check_indices(cut_family, U))
    ids_t = ids_u if T is None else tuple(p + 1 for p in _check_indices(cut_family, T))
    pos_u = tuple(i - 1 for i in ids_u)
    pos_t = tuple(i - 1 for i in ids_t)
    qs = _validate_split_points(Q)
    if any(q > len(ids_u) for q in qs):
        raise ParameterError("split points must lie within {2..|U|}")
    splits = {q: q - 1 for q in qs}
    if r_q_map:
        for q, r_q in r_q_map.items():
            if q not in splits:
                raise ParameterError(f"split position given for {q}, which is not in Q")
            splits[q] = r_q
    for q, r_q in splits.items():
        if not 1 <= r_q <= len(ids_t):
            raise ParameterError(
                f"split position for {q} must be between 1 and {len(ids_t)}, got {r_q}"
            )

    cover_g = _level_mask(cut_family.masks, pos_g, 1)
    cover_u = _level_mask(cut_family.masks, pos_u, 1)
    if cover_u & ~cover_g:
        raise PreconditionError(
            "the basic-cut union over G does not cover the one over U "
            f"(missing: {_labelled_extra(cut_family, cover_u & ~cover_g)})"
        )
    for q, r_q in splits.items():
        for family, side in ((cut_family, "cut"), (msg_family, "message")):
            left = _level_mask(family.masks, pos_u, q)
            right = _level_mask(family.masks, pos_t, r_q)
            if left & ~right:
                hint = ""
                if all(
                    not _level_mask(fam.masks, pos_u, q)
                    & ~_level_mask(fam.masks, pos_u, r_q)
                    for fam in (cut_family, msg_family)
                ):
                    hint = "; the containment does hold with T = U"
                raise PreconditionError(
                    f"{side}-side level {q} of U is not contained in "
                    f"level {r_q} of T (extra: "
                    f"{_labelled_extra(family, left & ~right)}){hint}"
                )

    set_g = frozenset(ids_g)
    set_u = frozenset(ids_u)
    set_t = frozenset(ids_t)
    terms = [BoundTerm(1, set_g, Fraction(1))]
    terms.extend(
        BoundTerm(r, set_u, Fraction(1))
        for r in range(2, len(ids_u) + 1)
        if r not in qs
    )
    for q in qs:
        r_q = splits[q]
        terms.extend(
            BoundTerm(r, set_t, alpha(qs, q, r, r_q)) for r in range(1, r_q + 1)
        )
    provenance = (
        f"thm2(G={_format_set(set_g)}, U={_format_set(set_u)}, "
        f"T={_format_set(set_t)}, Q={_format_set(qs)})"
    )
    if any(splits[q] != q - 1 for q in qs):
        inner = ",".join(f"{q}:{splits[q]}" for q in qs)
        provenance = provenance[:-1] + f", r_q={{{inner}}})"
    return BoundInequality.build(terms, provenance=provenance)


@dataclass(eq=False)
class InstantiatedInequality:
    """A bound evaluated on a concrete network: nonzero per-message rate
    coefficients, nonzero per-arc capacity coefficients, and optionally the
    numeric right side under given capacities (None when some arc on the
    right is unbounded)."""

    rate_coeffs: dict
    capacity_coeffs: dict
    rhs_value: Optional[Fraction]
    provenance: str

    def signature(self):
        """Scale-free canonical form used to recognize duplicates."""
        values = list(self.rate_coeffs.values()) + list(self.capacity_coeffs.values())
        if not values:
            return ((), ())
        scale_up = math.lcm(*(Fraction(v).denominator for v in values))
        units = [int(Fraction(v) * scale_up) for v in values]
        factor = Fraction(scale_up, math.gcd(*units))
        return (
            tuple(sorted((label, Fraction(v) * factor) for label, v in self.rate_coeffs.items())),
            tuple(
                sorted((label, Fraction(v) * factor) for label, v in self.capacity_coeffs.items())
            ),
        )

    def lhs_value(self, rates: Mapping) -> Fraction:
        total = Fraction(0)
        for label, coeff in self.rate_coeffs.items():
            if label not in rates:
                raise ParameterError(f"no rate given for message {label!r}")
            total += coeff * Fraction(rates[label])
        return total


def instantiate(
    bound: BoundInequality,
    cut_family: SubsetFamily,
    msg_family: SubsetFamily,
    capacities: Optional[Mapping] = None,
) -> InstantiatedInequality:
    """Evaluate a bound's term list on a network's demand and cut families.

    Each term adds its weight to every message in the corresponding demand
    level and to every arc in the corresponding cut level.  When capacities
    are given, the numeric right side is accumulated as well.
    """
    if cut_family.size != msg_family.size:
        raise ParameterError("cut and message families must have the same sink count")
    rate: dict = {}
    cap: dict = {}
    for aterm in bound.terms:
        pos = _check_indices(msg_family, aterm.indices)
        for family, coeffs in ((msg_family, rate), (cut_family, cap)):
            mask = _level_mask(family.masks, pos, aterm.level)
            while mask:
                low = mask & -mask
                label = family.ground.label(low.bit_length() - 1)
                coeffs[label] = coeffs.get(label, Fraction(0)) + aterm.weight
                mask ^= low
    rhs = None
    if capacities is not None:
        rhs = Fraction(0)
        for label, coeff in cap.items():
            if label not in capacities:
                raise ParameterError(f"no capacity given for arc {label!r}")
        if any(capacities[label] is None for label in cap):
            rhs = None
        else:
            rhs = sum((coeff * Fraction(capacities[label]) for label, coeff in cap.items()), Fraction(0))
    return InstantiatedInequality(
        rate_coeffs=rate,
        capacity_coeffs=cap,
        rhs_value=rhs,
        provenance=bound.provenance,
    )


def _ordered_subsets(K: int):
    for size in range(1, K + 1):
        yield from itertools.combinations(range(1, K + 1), size)


def enumerate_bounds(K: int, rules: Sequence[str]) -> list:
    """All bounds produced by the named rules for K sinks, deduplicated by
    canonical term list with the first origin kept.  Deterministic order:
    rules as given, sink subsets by size then lexicographically."""
    if not 1 <= K <= 16:
        raise ParameterError("the sink count must be between 1 and 16")
    rules = tuple(rules)
    for rule in rules:
        if rule not in ENUMERATION_RULES:
            raise ParameterError(
                f"unknown rule {rule!r}, expected one of {', '.join(ENUMERATION_RULES)}"
            )
    out: list = []
    seen: set = set()

    def push(bound: BoundInequality) -> None:
        if bound.terms not in seen:
            seen.add(bound.terms)
            out.append(bound)

    for rule in rules:
        if rule == "csb":
            for subset in _ordered_subsets(K):
                push(cutset_bound(subset))
        elif rule == "gcsb3":
            for triple in itertools.combinations(range(1, K + 1), 3):
                i, j, k = triple
                for a, b, c in ((i, j, k), (i, k, j), (j, k, i)):
                    push(gcsb3(a, b, c, "a"))
                push(gcsb3(i, j, k, "b"))
                for a, b, c in ((i, j, k), (i, k, j), (j, k, i)):
                    push(gcsb3(a, b, c, "c"))
                push(gcsb3(i, j, k, "d"))
        elif rule == "cor3":
            for subset in _ordered_subsets(K):
                for m in range(1, len(subset) + 1):
                    push(union_tail_bound(subset, m))
    return out


def thm2_search(cut_family: SubsetFamily, msg_family: SubsetFamily) -> list:
    """Instantiate every valid parameterization of the general bound on the
    given families, deduplicated by signature.  The search space grows as
    roughly 8^K subset triples, so the sink count is capped."""
    if cut_family.size != msg_family.size:
        raise ParameterError("cut and message families must have the same sink count")
    K = cut_family.size
    if K > MAX_SEARCH_SINKS:
        raise ParameterError(f"the search is limited to {MAX_SEARCH_SINKS} sinks")
    rows: list = []
    seen: set = set()
    subsets = list(_ordered_subsets(K))
    for set_g in subsets:
        for set_u in subsets:
            q_pool = range(2, len(set_u) + 1)
            for set_t in subsets:
                for q_size in range(len(set_u)):
                    for qs in itertools.combinations(q_pool, q_size):
                        if qs and max(qs) - 1 > len(set_t):
                            continue
                        try:
                            bound = gcsbK(
                                set_g,
                                set_u,
                                set_t,
                                qs,
                                cut_family=cut_family,
                                msg_family=msg_family,
                            )
                        except PreconditionError:
                            continue
                        row = instantiate(bound, cut_family, msg_family)
                        sig = row.signature()
                        if sig not in seen:
                            seen.add(sig)
                            rows.append(row)
    return rows
