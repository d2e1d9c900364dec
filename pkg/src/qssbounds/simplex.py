"""Exact rational linear programming with verifiable duals.

Problems are minimizations of a sparse rational form over free variables
subject to ``>=`` and ``=`` rows.  Everything is computed in
:class:`fractions.Fraction`; there is no floating point anywhere in the
solve path, so optima such as 3/2 are proved rather than approximated.

The solver is a two-phase simplex with Bland's anti-cycling rule.  The
systems this package generates have far more rows than variables, so the
pivoting works on the dual standard form (one nonnegative multiplier per
row) after a presolve that eliminates equality rows by exact
substitution; primal values and per-row dual multipliers for the
*original* problem are reconstructed exactly afterwards and re-verified
(feasibility, sign conditions and a zero duality gap) before an optimal
status is returned.  Identical problems produce identical pivot
sequences and identical solutions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class SimplexError(RuntimeError):
    """Internal solver invariant violation; indicates a bug, not bad input."""


def rat_str(value: Fraction) -> str:
    """Canonical "p/q" serialization (never floats)."""
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or plain integer strings."""
    return Fraction(text)


@dataclass(frozen=True)
class LPRow:
    id: str
    terms: tuple[tuple[int, Fraction], ...]
    rel: str  # ">=" or "="
    rhs: Fraction


@dataclass(frozen=True)
class LPProblem:
    """Minimize ``objective . x`` over free x subject to the rows."""

    num_vars: int
    objective: tuple[tuple[int, Fraction], ...]
    rows: tuple[LPRow, ...]


@dataclass(frozen=True)
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None
    primal: tuple[Fraction, ...] | None
    duals: tuple[Fraction, ...] | None  # one multiplier per problem row
    pivots: int


@dataclass(frozen=True)
class Certificate:
    """Replayable nonnegative combination of rows proving a lower bound.

    The weighted sum of the referenced row forms equals ``objective`` and
    the weighted right-hand sides add up to at least ``claimed_bound``.
    """

    claimed_bound: Fraction
    entries: tuple[tuple[str, Fraction], ...]
    objective: tuple[tuple[int, Fraction], ...]
    description: str = ""


class _Presolve:
    """Exact elimination of equality rows by back-substitution.

    Each usable equality pins its highest-index variable.  Reduction of
    any form records which eliminations were applied with what weights,
    so dual multipliers of the reduced problem can be lifted to exact
    multipliers on the original equality rows.
    """

    def __init__(self) -> None:
        self.pivots: list[int] = []          # pivot variable per record
        self.coefs: list[Fraction] = []      # pivot coefficient per record
        self.rests: list[dict[int, Fraction]] = []
        self.rhss: list[Fraction] = []
        # record k as a combination of original equality-row indices
        self.trans: list[dict[int, Fraction]] = []
        self.eliminated: set[int] = set()

    def reduce_form(
        self, terms: dict[int, Fraction], rhs: Fraction
    ) -> tuple[dict[int, Fraction], Fraction, dict[int, Fraction]]:
        """Apply all recorded substitutions to ``terms . x >= rhs``.

        Returns the reduced terms, reduced rhs and the sparse weight
        vector t (record index -> weight) that was subtracted.
        """
        terms = dict(terms)
        weights: dict[int, Fraction] = {}
        for k, pivot in enumerate(self.pivots):
            coef = terms.get(pivot)
            if not coef:
                terms.pop(pivot, None)
                continue
            t = coef / self.coefs[k]
            weights[k] = t
            del terms[pivot]
            for v, c in self.rests[k].items():
                nv = terms.get(v, ZERO) - t * c
                if nv:
                    terms[v] = nv
                else:
                    terms.pop(v, None)
            rhs = rhs - t * self.rhss[k]
        return terms, rhs, weights

    def add_equality(self, row_index: int, terms: dict[int, Fraction], rhs: Fraction) -> bool:
        """Digest one equality row; returns False on contradiction."""
        red_terms, red_rhs, weights = self.reduce_form(terms, rhs)
        combo: dict[int, Fraction] = {row_index: ONE}
        for k, t in weights.items():
            for j, w in self.trans[k].items():
                nv = combo.get(j, ZERO) - t * w
                if nv:
                    combo[j] = nv
                else:
                    combo.pop(j, None)
        if not red_terms:
            return red_rhs == 0  # redundant when 0 = 0, contradiction otherwise
        pivot = max(red_terms)
        coef = red_terms.pop(pivot)
        self.pivots.append(pivot)
        self.coefs.append(coef)
        self.rests.append(red_terms)
        self.rhss.append(red_rhs)
        self.trans.append(combo)
        self.eliminated.add(pivot)
        return True

    def lift_primal(self, reduced: dict[int, Fraction], num_vars: int) -> list[Fraction]:
        x = [ZERO] * num_vars
        for v, val in reduced.items():
            x[v] = val
        for k in range(len(self.pivots) - 1, -1, -1):
            acc = self.rhss[k]
            for v, c in self.rests[k].items():
                if x[v]:
                    acc -= c * x[v]
            x[self.pivots[k]] = acc / self.coefs[k]
        return x

    def equality_duals(self, alpha: dict[int, Fraction]) -> dict[int, Fraction]:
        """Multipliers on original equality rows from record weights."""
        lam: dict[int, Fraction] = {}
        for k, a in alpha.items():
            if not a:
                continue
            for j, w in self.trans[k].items():
                nv = lam.get(j, ZERO) + a * w
                if nv:
                    lam[j] = nv
                else:
                    lam.pop(j, None)
        return lam


class _Tableau:
    """Revised simplex (explicit basis inverse) on equality standard form.

    minimize cost . u  subject to  M u = d, u >= 0, where columns are
    sparse.  Artificial variables open phase 1; Bland's rule (lowest
    eligible column index enters, lowest basis id leaves on ties) makes
    every run deterministic and cycle-free.
    """

    def __init__(
        self,
        num_eqs: int,
        columns: list[list[tuple[int, Fraction]]],
        costs: list[Fraction],
        rhs: list[Fraction],
    ) -> None:
        self.m = num_eqs
        self.n = len(columns)
        self.sign = [ONE] * num_eqs
        self.columns = columns
        self.costs = costs
        self.rhs = list(rhs)
        for v in range(num_eqs):
            if self.rhs[v] < 0:
                self.sign[v] = -ONE
                self.rhs[v] = -self.rhs[v]
        # fold the equation sign flips into the stored columns once
        self.scols = [
            [(v, self.sign[v] * c) for v, c in col if c] for col in columns
        ]
        self.binv = [[ONE if i == j else ZERO for j in range(num_eqs)] for i in range(num_eqs)]
        self.xb = list(self.rhs)
        self.basis = [self.n + v for v in range(num_eqs)]  # artificial ids
        self.pivots = 0

    def column_entries(self, j: int) -> list[tuple[int, Fraction]]:
        if j >= self.n:  # artificial column
            return [(j - self.n, ONE)]
        return self.scols[j]

    def _pi(self, costs_basic: list[Fraction]) -> list[Fraction]:
        m = self.m
        pi = [ZERO] * m
        for i in range(m):
            cb = costs_basic[i]
            if not cb:
                continue
            row = self.binv[i]
            for v in range(m):
                rv = row[v]
                if rv:
                    pi[v] += cb * rv
        return pi

    def _basic_costs(self, phase: int) -> list[Fraction]:
        if phase == 1:
            return [ONE if b >= self.n else ZERO for b in self.basis]
        return [ZERO if b >= self.n else self.costs[b] for b in self.basis]

    def run(self, phase: int, max_iters: int = 2_000_000) -> str:
        """Pivot until optimal or unbounded; returns the stop reason."""
        in_basis = set(self.basis)
        for _ in range(max_iters):
            costs_basic = self._basic_costs(phase)
            pi = self._pi(costs_basic)
            entering = -1
            scols = self.scols
            costs = self.costs
            for j in range(self.n):  # artificials never re-enter
                if j in in_basis:
                    continue
                red = costs[j] if phase == 2 else ZERO
                for v, c in scols[j]:
                    pv = pi[v]
                    if pv:
                        red -= pv * c
                if red < 0:
                    entering = j
                    break
            if entering < 0:
                return "optimal"
            entries = self.column_entries(entering)
            binv = self.binv
            w = [ZERO] * self.m
            for v, c in entries:
                if not c:
                    continue
                for i in range(self.m):
                    bv = binv[i][v]
                    if bv:
                        w[i] += bv * c
            leave = -1
            best: Fraction | None = None
            for i in range(self.m):
                wi = w[i]
                if wi > 0:
                    ratio = self.xb[i] / wi
                    if best is None or ratio < best or (
                        ratio == best and self.basis[i] < self.basis[leave]
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                return "unbounded"
            self._pivot(entering, leave, w)
            in_basis = set(self.basis)
        raise SimplexError("iteration limit exceeded")

    def _pivot(self, entering: int, leave: int, w: list[Fraction]) -> None:
        m = self.m
        piv = w[leave]
        row = self.binv[leave]
        if piv != 1:
            inv = ONE / piv
            self.binv[leave] = row = [rv * inv for rv in row]
            self.xb[leave] *= inv
        xl = self.xb[leave]
        for i in range(m):
            if i == leave:
                continue
            f = w[i]
            if not f:
                continue
            target = self.binv[i]
            for v in range(m):
                rv = row[v]
                if rv:
                    target[v] -= f * rv
            if xl:
                self.xb[i] -= f * xl
        self.basis[leave] = entering
        self.pivots += 1

    def phase1_value(self) -> Fraction:
        return sum(
            (self.xb[i] for i in range(self.m) if self.basis[i] >= self.n), ZERO
        )

    def drive_out_artificials(self) -> None:
        """Pivot zero-valued basic artificials onto real columns.

        Must run between the phases: a later pivot may not move an
        artificial away from zero.  Rows where every real column has a
        zero entry are redundant equations; their artificial stays basic
        at zero and no ratio test can ever touch the row again.
        """
        in_basis = set(self.basis)
        for i in range(self.m):
            if self.basis[i] < self.n:
                continue
            if self.xb[i] != 0:
                raise SimplexError("positive artificial after phase 1")
            row = self.binv[i]
            for j in range(self.n):
                if j in in_basis:
                    continue
                val = ZERO
                for v, c in self.scols[j]:
                    rv = row[v]
                    if rv:
                        val += rv * c
                if val:
                    w = [ZERO] * self.m
                    for v, c in self.scols[j]:
                        if not c:
                            continue
                        for r in range(self.m):
                            bv = self.binv[r][v]
                            if bv:
                                w[r] += bv * c
                    self._pivot(j, i, w)
                    in_basis = set(self.basis)
                    break

    def solution(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for i, b in enumerate(self.basis):
            if b < self.n and self.xb[i]:
                out[b] = self.xb[i]
        return out

    def multipliers(self) -> list[Fraction]:
        """Row multipliers -sign*pi for the unflipped equations (phase 2)."""
        pi = self._pi(self._basic_costs(2))
        return [-self.sign[v] * pi[v] for v in range(self.m)]


def solve(problem: LPProblem) -> LPSolution:
    """Exact optimum of the problem with primal point and row duals.

    Statuses are ``optimal`` (with a strong-duality-checked solution),
    ``infeasible`` and ``unbounded``; arithmetic is exact, so there are
    no tolerance failures.
    """
    presolve = _Presolve()
    objective = dict(problem.objective)

    for idx, row in enumerate(problem.rows):
        if row.rel not in (">=", "="):
            raise ValueError(f"unsupported relation {row.rel!r} in row {row.id}")
        if row.rel == "=":
            if not presolve.add_equality(idx, dict(row.terms), row.rhs):
                return LPSolution("infeasible", None, None, None, 0)

    reduced_rows: list[tuple[int, dict[int, Fraction], Fraction, dict[int, Fraction]]] = []
    seen: set[tuple] = set()
    for idx, row in enumerate(problem.rows):
        if row.rel == "=":
            continue
        terms, rhs, weights = presolve.reduce_form(dict(row.terms), row.rhs)
        if not terms:
            if rhs > 0:
                return LPSolution("infeasible", None, None, None, 0)
            continue
        key = (tuple(sorted(terms.items())), rhs)
        if key in seen:
            continue
        seen.add(key)
        reduced_rows.append((idx, terms, rhs, weights))

    red_obj, obj_offset_neg, obj_weights = presolve.reduce_form(objective, ZERO)
    # reduce_form treats the constant like a rhs: c.x = red.x - obj_offset_neg
    obj_offset = -obj_offset_neg

    var_ids = sorted(set(red_obj) | {v for _, t, _, _ in reduced_rows for v in t})
    var_pos = {v: i for i, v in enumerate(var_ids)}
    m = len(var_ids)

    pivots = 0
    if m == 0:
        reduced_primal: dict[int, Fraction] = {}
        row_duals = [ZERO] * len(reduced_rows)
        value = obj_offset
    else:
        columns = [
            [(var_pos[v], c) for v, c in sorted(terms.items())]
            for _, terms, _, _ in reduced_rows
        ]
        costs = [-rhs for _, _, rhs, _ in reduced_rows]
        d = [red_obj.get(v, ZERO) for v in var_ids]
        tableau = _Tableau(m, columns, costs, d)
        if tableau.run(1) != "optimal":
            raise SimplexError("phase 1 cannot be unbounded")
        if tableau.phase1_value() != 0:
            status, extra = _classify_dual_infeasible(m, columns, reduced_rows)
            return LPSolution(status, None, None, None, tableau.pivots + extra)
        tableau.drive_out_artificials()
        reason = tableau.run(2)
        pivots = tableau.pivots
        if reason == "unbounded":
            return LPSolution("infeasible", None, None, None, pivots)
        u = tableau.solution()
        row_duals = [u.get(j, ZERO) for j in range(len(reduced_rows))]
        mult = tableau.multipliers()
        reduced_primal = {v: mult[var_pos[v]] for v in var_ids if mult[var_pos[v]]}
        value = obj_offset + sum(
            (row_duals[j] * reduced_rows[j][2] for j in range(len(reduced_rows))), ZERO
        )

    x = presolve.lift_primal(reduced_primal, problem.num_vars)

    alpha: dict[int, Fraction] = dict(obj_weights)
    duals = [ZERO] * len(problem.rows)
    for j, (orig_idx, _, _, weights) in enumerate(reduced_rows):
        uj = row_duals[j]
        if not uj:
            continue
        duals[orig_idx] = uj
        for k, t in weights.items():
            nv = alpha.get(k, ZERO) - uj * t
            if nv:
                alpha[k] = nv
            else:
                alpha.pop(k, None)
    for j, lam in presolve.equality_duals(alpha).items():
        duals[j] = lam

    _verify_optimal(problem, x, duals, value)
    return LPSolution("optimal", value, tuple(x), tuple(duals), pivots)


def _classify_dual_infeasible(m, columns, reduced_rows) -> tuple[str, int]:
    """Dual system has no solution: decide primal infeasible vs unbounded.

    A Farkas certificate of primal infeasibility is a nonnegative
    combination w of the inequality rows with zero total form and
    positive total rhs; we search for one with the normalization
    rhs . w = 1 as a pure feasibility problem.
    """
    ext_columns = []
    for j, col in enumerate(columns):
        rhs = reduced_rows[j][2]
        entries = list(col)
        if rhs:
            entries.append((m, rhs))
        ext_columns.append(entries)
    costs = [ZERO] * len(ext_columns)
    d = [ZERO] * m + [ONE]
    tableau = _Tableau(m + 1, ext_columns, costs, d)
    tableau.run(1)
    status = "infeasible" if tableau.phase1_value() == 0 else "unbounded"
    return status, tableau.pivots


def _verify_optimal(
    problem: LPProblem,
    x: list[Fraction],
    duals: list[Fraction],
    value: Fraction,
) -> None:
    """Exact post-checks: primal feasibility, signs and zero duality gap."""
    combo: dict[int, Fraction] = {}
    rhs_total = ZERO
    for row, u in zip(problem.rows, duals):
        lhs = sum((c * x[v] for v, c in row.terms), ZERO)
        if row.rel == "=":
            if lhs != row.rhs:
                raise SimplexError(f"primal violates equality {row.id}")
        else:
            if lhs < row.rhs:
                raise SimplexError(f"primal violates inequality {row.id}")
            if u < 0:
                raise SimplexError(f"negative multiplier on inequality {row.id}")
        if u:
            rhs_total += u * row.rhs
            for v, c in row.terms:
                nv = combo.get(v, ZERO) + u * c
                if nv:
                    combo[v] = nv
                else:
                    combo.pop(v, None)
    objective = {v: c for v, c in problem.objective if c}
    if combo != objective:
        raise SimplexError("dual combination does not reproduce the objective")
    primal_value = sum((c * x[v] for v, c in problem.objective), ZERO)
    if primal_value != value or rhs_total != value:
        raise SimplexError("duality gap is not zero")


def extract_certificate(
    problem: LPProblem, solution: LPSolution, description: str = ""
) -> Certificate:
    """Nonnegative combination of rows reconstructing objective and value."""
    if solution.status != "optimal":
        raise ValueError("certificates exist only for optimal solves")
    entries = tuple(
        (row.id, u)
        for row, u in zip(problem.rows, solution.duals)
        if u
    )
    return Certificate(
        claimed_bound=solution.value,
        entries=entries,
        objective=problem.objective,
        description=description,
    )
