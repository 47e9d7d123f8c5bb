"""Exact linear programming over the rationals.

Problems are ``maximize c.x  s.t.  A x <= b,  x >= 0`` with rational data.
The simplex runs on an integer tableau with a common denominator (fraction-free
Bareiss pivoting), so every entry stays an exact integer; Bland's rule prevents
cycling. ``leximin_max`` refines a sum-maximising point to the leximin optimum.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Mapping, Optional, Sequence, Union

Number = Union[int, Fraction]


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class UnboundedError(ValueError):
    pass


@dataclass(frozen=True)
class LinearProgram:
    variables: tuple[str, ...]
    objective: tuple[Fraction, ...]
    constraints: tuple[tuple[tuple[Fraction, ...], Fraction], ...]

    @classmethod
    def build(
        cls,
        variables: Sequence[str],
        objective: Mapping[str, Number] | Sequence[Number],
        constraints: Sequence[tuple[Mapping[str, Number] | Sequence[Number], Number]],
    ) -> LinearProgram:
        """Build from sparse (name -> coefficient) or dense rows; each row reads ``a.x <= rhs``."""
        variables = tuple(variables)
        index = {v: k for k, v in enumerate(variables)}
        if len(index) != len(variables):
            raise ValueError("duplicate variable names")

        def dense(row) -> tuple[Fraction, ...]:
            if isinstance(row, Mapping):
                out = [Fraction(0)] * len(variables)
                for name, coef in row.items():
                    if name not in index:
                        raise ValueError(f"undeclared variable {name!r}")
                    out[index[name]] += Fraction(coef)
                return tuple(out)
            if len(row) != len(variables):
                raise ValueError("row length does not match variables")
            return tuple(Fraction(c) for c in row)

        return cls(variables, dense(objective),
                   tuple((dense(a), Fraction(b)) for a, b in constraints))

    def with_objective(self, objective) -> LinearProgram:
        return LinearProgram.build(self.variables, objective, self.constraints)

    def with_constraints(self, extra) -> LinearProgram:
        return LinearProgram.build(self.variables, self.objective, list(self.constraints) + list(extra))

    def satisfied_by(self, point: Mapping[str, Fraction]) -> bool:
        x = [Fraction(point[v]) for v in self.variables]
        if any(xi < 0 for xi in x):
            return False
        return all(sum(a * xi for a, xi in zip(row, x)) <= b for row, b in self.constraints)


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    value: Optional[Fraction] = None
    point: Optional[dict[str, Fraction]] = None

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _integer_row(coeffs: Sequence[Fraction], rhs: Fraction) -> tuple[list[int], int]:
    scale = lcm(*(c.denominator for c in coeffs), rhs.denominator)
    return [int(c * scale) for c in coeffs], int(rhs * scale)


class _Tableau:
    """Integer simplex tableau; the true tableau is ``rows / den``."""

    def __init__(self, rows: list[list[int]], basis: list[int]):
        self.rows = rows
        self.basis = basis
        self.den = 1

    def pivot(self, r: int, c: int, obj: list[list[int]]) -> None:
        rows, den = self.rows, self.den
        prow = rows[r]
        p = prow[c]
        for k, row in enumerate(rows):
            if k != r:
                f = row[c]
                rows[k] = [(a * p - f * b) // den for a, b in zip(row, prow)]
        for k, row in enumerate(obj):
            f = row[c]
            obj[k] = [(a * p - f * b) // den for a, b in zip(row, prow)]
        self.den = p
        if p < 0:
            self.rows = [[-a for a in row] for row in self.rows]
            obj[:] = [[-a for a in row] for row in obj]
            self.den = -p
        self.basis[r] = c

    def run(self, obj: list[list[int]], allowed: int) -> bool:
        """Optimise ``obj[0]`` with Bland's rule over columns < ``allowed``; False if unbounded."""
        while True:
            z = obj[0]
            enter = next((j for j in range(allowed) if z[j] < 0), None)
            if enter is None:
                return True
            best = None
            for r, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    if best is None:
                        best = r
                        continue
                    lhs = row[-1] * self.rows[best][enter]
                    rhs = self.rows[best][-1] * a
                    if lhs < rhs or (lhs == rhs and self.basis[r] < self.basis[best]):
                        best = r
            if best is None:
                return False
            self.pivot(best, enter, obj)


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Exact optimum of ``lp`` (maximisation) by two-phase simplex."""
    nv = len(lp.variables)
    m = len(lp.constraints)
    negative = [k for k, (_, b) in enumerate(lp.constraints) if b < 0]
    na = len(negative)
    width = nv + m + na + 1
    rows = []
    basis = []
    art = nv + m
    for k, (coeffs, b) in enumerate(lp.constraints):
        a, rhs = _integer_row(coeffs, b)
        row = [0] * width
        if rhs < 0:
            row[:nv] = [-x for x in a]
            row[nv + k] = -1
            row[art] = 1
            row[-1] = -rhs
            basis.append(art)
            art += 1
        else:
            row[:nv] = a
            row[nv + k] = 1
            row[-1] = rhs
            basis.append(nv + k)
        rows.append(row)
    tab = _Tableau(rows, basis)

    if na:
        # Phase 1: maximise -sum(artificials).
        phase1 = [0] * width
        for j in range(nv + m, nv + m + na):
            phase1[j] = 1
        for r, b in enumerate(basis):
            if b >= nv + m:
                phase1 = [x - y for x, y in zip(phase1, rows[r])]
        obj = [phase1]
        tab.run(obj, nv + m + na)
        if obj[0][-1] != 0:
            return LpOutcome(LpStatus.INFEASIBLE)
        # Drive zero-level artificials out of the basis; drop redundant rows.
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= nv + m:
                col = next((j for j in range(nv + m) if tab.rows[r][j] != 0), None)
                if col is None:
                    del tab.rows[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, col, obj)
            r += 1
        tab.rows = [row[: nv + m] + [row[-1]] for row in tab.rows]

    scale = lcm(*(c.denominator for c in lp.objective))
    c = [int(x * scale) for x in lp.objective]
    z = [0] * (nv + m + 1)
    for j in range(nv):
        z[j] = -c[j] * tab.den
    for r, b in enumerate(tab.basis):
        if b < nv and c[b]:
            z = [x + c[b] * y for x, y in zip(z, tab.rows[r])]
    obj = [z]
    if not tab.run(obj, nv + m):
        return LpOutcome(LpStatus.UNBOUNDED)
    point = [Fraction(0)] * nv
    for r, b in enumerate(tab.basis):
        if b < nv:
            point[b] = Fraction(tab.rows[r][-1], tab.den)
    value = Fraction(obj[0][-1], tab.den * scale)
    return LpOutcome(LpStatus.OPTIMAL, value, dict(zip(lp.variables, point)))


# --- leximin -----------------------------------------------------------------

class _Reduced:
    """An LP with some variables fixed at constants and substituted out."""

    def __init__(self, lp: LinearProgram, fixed: Mapping[str, Fraction]):
        self.free = [v for v in lp.variables if v not in fixed]
        pos = {v: k for k, v in enumerate(lp.variables)}
        self.rows = []
        for coeffs, b in lp.constraints:
            rhs = b - sum(coeffs[pos[v]] * val for v, val in fixed.items())
            row = {v: coeffs[pos[v]] for v in self.free if coeffs[pos[v]]}
            if not row:
                if rhs < 0:
                    raise ValueError("fixed values violate a constraint")
                continue
            self.rows.append((row, rhs))

    def program(self, objective: Mapping[str, Number], extra=(), extra_vars=()) -> LinearProgram:
        return LinearProgram.build(self.free + list(extra_vars), objective, self.rows + list(extra))


def leximin_max(lp: LinearProgram, groups: Sequence[Sequence[str]] | None = None) -> dict[str, Fraction]:
    """Sum-maximising point of ``lp`` that is leximin-maximal, group by group.

    Stage 1 maximises the sum of all variables. Stage 2 fixes that sum and, for
    each group in order, repeatedly maximises the smallest still-free component
    of the group and fixes the components that cannot exceed it. With the
    default single group this is the plain leximin point, which is unique.
    """
    if groups is None:
        groups = [lp.variables]
    total = solve_lp(lp.with_objective({v: 1 for v in lp.variables}))
    if total.status is LpStatus.UNBOUNDED:
        raise UnboundedError("stage 1 is unbounded")
    if total.status is LpStatus.INFEASIBLE:
        raise ValueError("infeasible program")
    base = lp.with_constraints([({v: -1 for v in lp.variables}, -total.value)])
    fixed: dict[str, Fraction] = {}
    for group in groups:
        free = [v for v in group if v not in fixed]
        while free:
            red = _Reduced(base, fixed)
            level = solve_lp(red.program(
                {"__t": 1},
                extra=[({v: -1, "__t": 1}, 0) for v in free],
                extra_vars=["__t"],
            ))
            t = level.value
            floor = [({v: -1}, -t) for v in free]
            candidates = [v for v in free if level.point[v] == t]
            blocked = []
            while candidates:
                v = candidates.pop(0)
                best = solve_lp(red.program({v: 1}, extra=floor))
                if best.value == t:
                    blocked.append(v)
                candidates = [u for u in candidates if best.point[u] == t]
            if not blocked:
                raise RuntimeError("leximin level found no blocked component")
            for v in blocked:
                fixed[v] = t
            free = [v for v in free if v not in fixed]
    if len(fixed) < len(lp.variables):
        # Variables outside every group: take any point of the remaining face.
        rest = solve_lp(_Reduced(base, fixed).program({}))
        fixed.update(rest.point)
    return {v: fixed[v] for v in lp.variables}
