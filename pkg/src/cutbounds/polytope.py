"""Exact-rational linear inequality systems over named variables.

Systems are conjunctions of rows `sum a_i x_i <= b` with per-variable
implicit nonnegativity.  Everything is Fraction arithmetic: projections
(Fourier-Motzkin), feasibility, 2-D vertex enumeration, and containment
are exact, which keeps golden-file comparisons byte-stable.

Redundancy removal after each elimination runs in tiers:

  1. drop rows that hold identically (including under nonnegativity),
  2. merge duplicates and positive multiples (canonical integer scaling),
  3. drop rows implied by a single other row (exact multiplier search),
  3b. drop rows implied by the sum of two other rows at unit multipliers,
  4. when at most 64 rows remain, drop every row whose strict violation
     is infeasible against the rest (full irredundancy).

Tier 4 runs a bounded feasibility subroutine; when an intermediate system
inside that subroutine outgrows its row budget, the row under test is
conservatively kept.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import comb, gcd, lcm
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import ParameterError, UnboundedRegionError

Rational = Union[Fraction, int, str]

FULL_REDUNDANCY_ROW_LIMIT = 64
FEASIBILITY_ROW_BUDGET = 2000
DOMINATION_ROW_LIMIT = 200
CONTAINS_VARIABLE_LIMIT = 4


def parse_rational(text) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, TypeError, ZeroDivisionError):
        raise ParameterError(f"not a rational number: {text!r}") from None


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Row:
    """One inequality: coeffs . x <= rhs, or < rhs when strict."""

    coeffs: tuple[Fraction, ...]
    rhs: Fraction
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))


@dataclass(frozen=True)
class LinearSystem:
    """Immutable inequality system; `nonneg[i]` toggles x_i >= 0."""

    variables: tuple[str, ...]
    rows: tuple[Row, ...]
    nonneg: tuple[bool, ...]
    infeasible: bool = field(init=False, default=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "nonneg", tuple(bool(f) for f in self.nonneg))
        if not self.variables:
            raise ParameterError("a system needs at least one variable")
        if len(set(self.variables)) != len(self.variables):
            raise ParameterError("variable names must be distinct")
        if len(self.nonneg) != len(self.variables):
            raise ParameterError("nonneg flags must align with variables")
        n = len(self.variables)
        flagged = False
        for row in self.rows:
            if not isinstance(row, Row) or len(row.coeffs) != n:
                raise ParameterError("row width must match the variable list")
            if all(c == 0 for c in row.coeffs):
                if row.rhs < 0 or (row.strict and row.rhs <= 0):
                    flagged = True
        object.__setattr__(self, "infeasible", flagged)

    @classmethod
    def from_rows(
        cls,
        variables: Sequence[str],
        rows: Iterable[tuple[Mapping[str, Rational], Rational]],
        nonneg=None,
    ) -> "LinearSystem":
        variables = tuple(variables)
        index = {v: i for i, v in enumerate(variables)}
        built = []
        for coeffs, rhs in rows:
            dense = [Fraction(0)] * len(variables)
            for name, value in coeffs.items():
                if name not in index:
                    raise ParameterError(f"row references unknown variable {name!r}")
                dense[index[name]] = Fraction(value)
            built.append(Row(tuple(dense), Fraction(rhs)))
        if nonneg is None:
            flags = (True,) * len(variables)
        elif isinstance(nonneg, Mapping):
            flags = tuple(bool(nonneg.get(v, True)) for v in variables)
        else:
            flags = tuple(bool(f) for f in nonneg)
        return cls(variables, tuple(built), flags)

    def coeff_map(self, row: Row) -> dict[str, Fraction]:
        return {v: c for v, c in zip(self.variables, row.coeffs) if c != 0}


def satisfies(sys: LinearSystem, point: Mapping[str, Rational]) -> bool:
    """Exact membership test for a named point."""
    values = []
    for v, flag in zip(sys.variables, sys.nonneg):
        if v not in point:
            raise ParameterError(f"point is missing variable {v!r}")
        x = Fraction(point[v])
        if flag and x < 0:
            return False
        values.append(x)
    for row in sys.rows:
        total = sum(c * x for c, x in zip(row.coeffs, values))
        if total > row.rhs or (row.strict and total == row.rhs):
            return False
    return True


# ---------------------------------------------------------------------------
# canonical form and redundancy tiers


def _scale(row: Row) -> Row:
    denom = lcm(row.rhs.denominator, *(c.denominator for c in row.coeffs))
    ints = [int(c * denom) for c in row.coeffs] + [int(row.rhs * denom)]
    g = gcd(*ints)
    if g == 0:
        g = 1
    return Row(
        tuple(Fraction(v, g) for v in ints[:-1]), Fraction(ints[-1], g), row.strict
    )


def _holds_identically(row: Row, nonneg: tuple[bool, ...]) -> bool:
    """True when nonnegativity alone already forces the row."""
    for c, flag in zip(row.coeffs, nonneg):
        if c > 0 or (c < 0 and not flag):
            return False
    # the lhs cannot exceed 0 anywhere in the orthant
    return row.rhs > 0 or (row.rhs == 0 and not row.strict)


def _tiers_basic(
    rows: Iterable[Row], nonneg: tuple[bool, ...]
) -> tuple[list[Row], bool]:
    """Tiers 1-2: scale, drop identically-true rows, dedupe, sort.

    Returns (rows, infeasible-witness-seen).
    """
    seen: dict = {}
    infeasible = False
    for row in rows:
        row = _scale(row)
        if all(c == 0 for c in row.coeffs):
            if row.rhs < 0 or (row.strict and row.rhs <= 0):
                infeasible = True
            continue
        if _holds_identically(row, nonneg):
            continue
        key = (row.coeffs, row.rhs)
        if key not in seen or (row.strict and not seen[key].strict):
            seen[key] = row
    ordered = sorted(seen.values(), key=lambda r: (r.coeffs, r.rhs, r.strict))
    return ordered, infeasible


def _single_row_implies(s: Row, r: Row, nonneg: tuple[bool, ...]) -> bool:
    """Does row s alone (plus nonnegativity) force row r?

    Searches for a multiplier lam > 0 with lam*a_s >= a_r componentwise
    (equality on free variables) and lam*b_s <= b_r (strictly when r is
    strict but s is not).
    """
    lo, hi = Fraction(0), None
    for a, c, flag in zip(s.coeffs, r.coeffs, nonneg):
        if not flag:
            if a == 0:
                if c != 0:
                    return False
            else:
                lam = c / a
                lo = max(lo, lam)
                hi = lam if hi is None else min(hi, lam)
        elif a > 0:
            lo = max(lo, c / a)
        elif a < 0:
            bound = c / a
            hi = bound if hi is None else min(hi, bound)
        elif c > 0:
            return False
    if hi is not None and (lo > hi or hi <= 0):
        return False
    strict_needed = r.strict and not s.strict

    def value_ok(value: Fraction) -> bool:
        return value < r.rhs if strict_needed else value <= r.rhs

    if s.rhs == 0:
        return value_ok(Fraction(0))
    if s.rhs < 0:
        if hi is None:
            return True  # lam arbitrarily large drives lam*b_s below any bound
        return value_ok(hi * s.rhs)
    if lo > 0:
        return value_ok(lo * s.rhs)
    return r.rhs > 0  # lam can approach 0 from above, lam*b_s approaches 0


def _pair_implies(a: Row, b: Row, r: Row, nonneg: tuple[bool, ...]) -> bool:
    """Unit-multiplier two-row domination: a + b forces r."""
    if a.strict or b.strict or r.strict:
        return False
    if a.rhs + b.rhs > r.rhs:
        return False
    for ca, cb, cr, flag in zip(a.coeffs, b.coeffs, r.coeffs, nonneg):
        total = ca + cb
        if flag:
            if cr > total:
                return False
        elif cr != total:
            return False
    return True


def _tier_single_domination(rows: list[Row], nonneg: tuple[bool, ...]) -> list[Row]:
    removed = [False] * len(rows)
    for i, r in enumerate(rows):
        for j, s in enumerate(rows):
            if i == j or removed[j]:
                continue
            if _single_row_implies(s, r, nonneg):
                removed[i] = True
                break
    return [r for r, gone in zip(rows, removed) if not gone]


def _tier_pair_domination(rows: list[Row], nonneg: tuple[bool, ...]) -> list[Row]:
    removed = [False] * len(rows)
    for i, r in enumerate(rows):
        found = False
        for a_idx in range(len(rows)):
            if found:
                break
            if a_idx == i or removed[a_idx]:
                continue
            for b_idx in range(a_idx, len(rows)):
                if b_idx == i or removed[b_idx]:
                    continue
                if _pair_implies(rows[a_idx], rows[b_idx], r, nonneg):
                    found = True
                    break
        if found:
            removed[i] = True
    return [r for r, gone in zip(rows, removed) if not gone]


def _strictly_feasible(
    rows: Sequence[Row],
    nonneg: tuple[bool, ...],
    include_nonneg: bool = True,
) -> Optional[bool]:
    """Exact feasibility of a (possibly strict) system; None on blowup.

    Eliminates every variable in turn, cheap tiers between rounds; at the
    end only constant rows remain and consistency is a direct check.
    Nonnegative variables are materialized as rows up front unless
    `include_nonneg` is off (redundancy checks judge rows alone).
    """
    n = len(nonneg)
    free = (False,) * n
    work = list(rows)
    if include_nonneg:
        for i, flag in enumerate(nonneg):
            if flag:
                work.append(
                    Row(
                        tuple(Fraction(-1 if j == i else 0) for j in range(n)),
                        Fraction(0),
                    )
                )
    work, infeasible = _tiers_basic(work, free)
    if infeasible:
        return False
    remaining = list(range(n))
    while remaining:
        best = min(
            remaining,
            key=lambda idx: (
                sum(1 for r in work if r.coeffs[idx] > 0)
                * sum(1 for r in work if r.coeffs[idx] < 0),
                idx,
            ),
        )
        remaining.remove(best)
        pos = [r for r in work if r.coeffs[best] > 0]
        neg = [r for r in work if r.coeffs[best] < 0]
        passthrough = [r for r in work if r.coeffs[best] == 0]
        combined = []
        for p in pos:
            for q in neg:
                cp, cq = p.coeffs[best], -q.coeffs[best]
                coeffs = tuple(cq * x + cp * y for x, y in zip(p.coeffs, q.coeffs))
                combined.append(
                    Row(coeffs, cq * p.rhs + cp * q.rhs, p.strict or q.strict)
                )
        work, infeasible = _tiers_basic(passthrough + combined, free)
        if infeasible:
            return False
        if len(work) > FEASIBILITY_ROW_BUDGET:
            return None
        if len(work) <= DOMINATION_ROW_LIMIT:
            work = _tier_single_domination(work, free)
    return True


def _reduce_rows(
    rows: Iterable[Row], nonneg: tuple[bool, ...]
) -> tuple[list[Row], bool]:
    work, infeasible = _tiers_basic(rows, nonneg)
    if infeasible:
        return work, True
    work = _tier_single_domination(work, nonneg)
    work = _tier_pair_domination(work, nonneg)
    if len(work) <= FULL_REDUNDANCY_ROW_LIMIT:
        # implication by the remaining rows alone (nonnegativity-implied
        # rows were the earlier tiers' job); a row survives when its
        # strict negation stays feasible against the rest
        i = 0
        while i < len(work):
            row = work[i]
            others = work[:i] + work[i + 1 :]
            negation = Row(
                tuple(-c for c in row.coeffs), -row.rhs, strict=not row.strict
            )
            verdict = _strictly_feasible(
                others + [negation], nonneg, include_nonneg=False
            )
            if verdict is False:
                work.pop(i)
            else:
                i += 1  # feasible or unknown: the row does real work, keep it
    return work, False


def _with_rows(sys: LinearSystem, rows, infeasible: bool) -> LinearSystem:
    if infeasible:
        rows = [Row(tuple(Fraction(0) for _ in sys.variables), Fraction(-1))]
    return LinearSystem(sys.variables, tuple(rows), sys.nonneg)


def canonicalize(sys: LinearSystem) -> LinearSystem:
    """Scale rows to coprime integers, drop trivial rows, dedupe, sort."""
    rows, infeasible = _tiers_basic(sys.rows, sys.nonneg)
    return _with_rows(sys, rows, infeasible or sys.infeasible)


def feasible(sys: LinearSystem) -> bool:
    if sys.infeasible:
        return False
    verdict = _strictly_feasible(sys.rows, sys.nonneg)
    if verdict is None:
        raise ParameterError("feasibility check exceeded its size budget")
    return verdict


# ---------------------------------------------------------------------------
# projection


def fourier_motzkin(sys: LinearSystem, var: str) -> LinearSystem:
    """Eliminate one variable exactly; output is reduced (tiers 1-4).

    The variable keeps its slot in the variable list (its coefficients all
    become zero), so eliminating a variable absent from every row is the
    identity.
    """
    if var not in sys.variables:
        raise ParameterError(f"unknown variable {var!r}")
    if sys.infeasible:
        return _with_rows(sys, (), True)
    idx = sys.variables.index(var)
    pos = [r for r in sys.rows if r.coeffs[idx] > 0]
    neg = [r for r in sys.rows if r.coeffs[idx] < 0]
    passthrough = [r for r in sys.rows if r.coeffs[idx] == 0]
    if sys.nonneg[idx]:
        zeros = tuple(
            Fraction(-1 if i == idx else 0) for i in range(len(sys.variables))
        )
        neg.append(Row(zeros, Fraction(0)))
    combined = []
    for p in pos:
        for q in neg:
            cp, cq = p.coeffs[idx], -q.coeffs[idx]
            coeffs = tuple(cq * x + cp * y for x, y in zip(p.coeffs, q.coeffs))
            combined.append(Row(coeffs, cq * p.rhs + cp * q.rhs, p.strict or q.strict))
    rows, infeasible = _reduce_rows(passthrough + combined, sys.nonneg)
    return _with_rows(sys, rows, infeasible)


def project(
    sys: LinearSystem, keep: Sequence[str], order: Optional[Sequence[str]] = None
) -> LinearSystem:
    """Eliminate every variable outside `keep` and drop the emptied columns.

    The default elimination order greedily picks the variable with the
    fewest positive*negative row pairings; pass `order` to override.
    """
    keep = tuple(keep)
    for v in keep:
        if v not in sys.variables:
            raise ParameterError(f"unknown variable {v!r}")
    to_drop = [v for v in sys.variables if v not in keep]
    if order is not None:
        order = list(order)
        if sorted(order) != sorted(to_drop):
            raise ParameterError("order must list exactly the eliminated variables")
    current = sys
    pending = list(to_drop)
    while pending:
        if order is not None:
            var = order.pop(0)
        else:
            var = min(
                pending,
                key=lambda v: (
                    sum(
                        1
                        for r in current.rows
                        if r.coeffs[current.variables.index(v)] > 0
                    )
                    * sum(
                        1
                        for r in current.rows
                        if r.coeffs[current.variables.index(v)] < 0
                    ),
                    current.variables.index(v),
                ),
            )
        pending.remove(var)
        current = fourier_motzkin(current, var)
    kept_order = [v for v in current.variables if v in keep]
    index = [current.variables.index(v) for v in kept_order]
    rows = tuple(
        Row(tuple(r.coeffs[i] for i in index), r.rhs, r.strict) for r in current.rows
    )
    return LinearSystem(
        tuple(kept_order), rows, tuple(current.nonneg[i] for i in index)
    )


def substitute(
    sys: LinearSystem,
    var: str,
    coeffs: Mapping[str, Rational],
    const: Rational = 0,
) -> LinearSystem:
    """Replace `var` by an affine expression; exact, then canonicalized.

    New names in the expression are appended as nonnegative variables.
    If `var` was nonnegative, the row `expr >= 0` is added so the
    substitution cannot silently widen the region.
    """
    if var not in sys.variables:
        raise ParameterError(f"unknown variable {var!r}")
    expr = {}
    for name, value in coeffs.items():
        value = Fraction(value)
        if value != 0:
            expr[name] = value
    const = Fraction(const)

    keep_var = var in expr
    out_vars = [v for v in sys.variables if keep_var or v != var]
    out_nonneg = {
        v: flag
        for v, flag in zip(sys.variables, sys.nonneg)
        if keep_var or v != var
    }
    for name in expr:
        if name not in out_nonneg:
            out_vars.append(name)
            out_nonneg[name] = True

    var_idx = sys.variables.index(var)
    index = {v: i for i, v in enumerate(out_vars)}
    n = len(out_vars)

    def translate(row: Row) -> Row:
        c = row.coeffs[var_idx]
        dense = [Fraction(0)] * n
        for v, a in zip(sys.variables, row.coeffs):
            if v != var:
                dense[index[v]] += a
        for name, a in expr.items():
            dense[index[name]] += c * a
        return Row(tuple(dense), row.rhs - c * const, row.strict)

    rows = [translate(r) for r in sys.rows]
    if sys.nonneg[var_idx]:
        dense = [Fraction(0)] * n
        for name, a in expr.items():
            dense[index[name]] -= a
        rows.append(Row(tuple(dense), const))
    out = LinearSystem(
        tuple(out_vars), tuple(rows), tuple(out_nonneg[v] for v in out_vars)
    )
    return canonicalize(out)


# ---------------------------------------------------------------------------
# two-dimensional geometry


def _normalize_direction(d: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    denom = lcm(d[0].denominator, d[1].denominator)
    a, b = int(d[0] * denom), int(d[1] * denom)
    g = gcd(a, b)
    if g > 1:
        a, b = a // g, b // g
    return (Fraction(a), Fraction(b))


def _recession_ray(sys: LinearSystem):
    candidates = [
        (Fraction(1), Fraction(0)),
        (Fraction(0), Fraction(1)),
        (Fraction(-1), Fraction(0)),
        (Fraction(0), Fraction(-1)),
    ]
    for row in sys.rows:
        a, b = row.coeffs
        candidates.append((b, -a))
        candidates.append((-b, a))
    for d in candidates:
        if d == (0, 0):
            continue
        if sys.nonneg[0] and d[0] < 0:
            continue
        if sys.nonneg[1] and d[1] < 0:
            continue
        if all(r.coeffs[0] * d[0] + r.coeffs[1] * d[1] <= 0 for r in sys.rows):
            return _normalize_direction(d)
    return None


def vertices_2d(sys: LinearSystem) -> list[tuple[Fraction, Fraction]]:
    """All vertices of a bounded 2-D region, counterclockwise.

    The listing starts at the lowest vertex (ties broken leftward), which
    for regions touching the origin means starting there and walking the
    x-axis first.  Infeasible systems yield an empty list.
    """
    if len(sys.variables) != 2:
        raise ParameterError("vertex enumeration needs exactly 2 variables")
    sys = canonicalize(sys)
    if sys.infeasible or not feasible(sys):
        return []
    ray = _recession_ray(sys)
    if ray is not None:
        raise UnboundedRegionError(
            f"region is unbounded along the ray ({format_rational(ray[0])}, "
            f"{format_rational(ray[1])})",
            ray=ray,
        )

    lines = [(r.coeffs[0], r.coeffs[1], r.rhs) for r in sys.rows]
    if sys.nonneg[0]:
        lines.append((Fraction(-1), Fraction(0), Fraction(0)))
    if sys.nonneg[1]:
        lines.append((Fraction(0), Fraction(-1), Fraction(0)))

    points = set()
    for i in range(len(lines)):
        a1, b1, c1 = lines[i]
        for j in range(i + 1, len(lines)):
            a2, b2, c2 = lines[j]
            det = a1 * b2 - a2 * b1
            if det == 0:
                continue
            x = (c1 * b2 - c2 * b1) / det
            y = (a1 * c2 - a2 * c1) / det
            if satisfies(sys, {sys.variables[0]: x, sys.variables[1]: y}):
                points.add((x, y))

    ordered = sorted(points, key=lambda p: (p[1], p[0]))
    if len(ordered) <= 2:
        return ordered

    cx = sum(p[0] for p in points) / len(points)
    cy = sum(p[1] for p in points) / len(points)

    def half(p):
        dx, dy = p[0] - cx, p[1] - cy
        return 0 if dy > 0 or (dy == 0 and dx > 0) else 1

    def compare(p, q):
        hp, hq = half(p), half(q)
        if hp != hq:
            return -1 if hp < hq else 1
        c = (p[0] - cx) * (q[1] - cy) - (q[0] - cx) * (p[1] - cy)
        return -1 if c > 0 else (1 if c < 0 else 0)

    ring = sorted(points, key=cmp_to_key(compare))
    start = ring.index(ordered[0])
    return ring[start:] + ring[:start]


def contains(outer: LinearSystem, inner: LinearSystem) -> bool:
    """Exact region containment: inner a subset of outer."""
    if outer.variables != inner.variables or outer.nonneg != inner.nonneg:
        raise ParameterError("containment needs identical variable lists")
    n = len(outer.variables)
    if n == 2:
        names = outer.variables
        return all(
            satisfies(outer, {names[0]: x, names[1]: y})
            for x, y in vertices_2d(inner)
        )
    if n > CONTAINS_VARIABLE_LIMIT:
        raise ParameterError(
            f"containment supports 2 variables or at most {CONTAINS_VARIABLE_LIMIT}"
        )
    for row in canonicalize(outer).rows:
        negation = Row(tuple(-c for c in row.coeffs), -row.rhs, strict=not row.strict)
        verdict = _strictly_feasible(list(inner.rows) + [negation], inner.nonneg)
        if verdict is None:
            raise ParameterError("containment check exceeded its size budget")
        if verdict:
            return False
    return True


def corner_points_symmetric(
    K: int, c: Sequence[Rational]
) -> list[tuple[Fraction, Fraction]]:
    """Closed-form corner points of the symmetric two-axis region.

    Point r (r = 1..K+1) is
      ( sum_{i=r}^{K} binom(K-1, i-1)*C_i , sum_{i=1}^{r-1} binom(K, i)*C_i ).
    """
    if not isinstance(K, int) or K < 1:
        raise ParameterError("K must be a positive integer")
    caps = [Fraction(v) for v in c]
    if len(caps) != K:
        raise ParameterError(f"capacity list must have length {K}")
    if any(v < 0 for v in caps):
        raise ParameterError("capacities must be nonnegative")
    points = []
    for r in range(1, K + 2):
        x = sum((comb(K - 1, i - 1) * caps[i - 1] for i in range(r, K + 1)), Fraction(0))
        y = sum((comb(K, i) * caps[i - 1] for i in range(1, r)), Fraction(0))
        points.append((x, y))
    return points


def write_vertices_csv(points, destination) -> None:
    """Write "x,y" rows of exact rationals ("p/q", integers bare)."""
    with open(destination, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["x", "y"])
        for x, y in points:
            writer.writerow([format_rational(x), format_rational(y)])
