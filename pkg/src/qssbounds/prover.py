"""Bound computation, implied-inequality checking and certificate replay.

`share_bound` turns an access structure into the entropy constraint
system, attaches an objective over selected share entropies and solves it
exactly; the result ships with a certificate that `verify_certificate`
replays by pure constraint arithmetic, never consulting the solver.

`check_implied` decides whether a linear inequality over subset
entropies is a consequence of a system by minimizing its slack; the
lemma and chain suites drive it over the scheme relations that every
perfect realization must satisfy.  For a full-mode system the checks
first run against the elemental subsystem (whose rows are a subset of
the full rows, so any certificate found there is already a certificate
for the full system) and only fall back to the full solve when needed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .cone import ConstraintSystem, GroundSet, LinearConstraint, build_system
from .simplex import (
    Certificate,
    LPProblem,
    LPRow,
    rat_str,
    extract_certificate,
    solve,
)
from .structures import (
    AccessStructure,
    CapacityError,
    StructureError,
    csirmaz,
    is_quantum,
    is_self_dual,
    purify,
    structure_to_dict,
    theorem3_reference_bound,
)

ZERO = Fraction(0)
ONE = Fraction(1)

#: Ground-set sizes above this need force=True; exact pivoting on larger
#: instances can take far longer than the defaults should.
DEFAULT_ELEMENT_LIMIT = 9


class ProverError(RuntimeError):
    """A solve that must succeed came back without an optimum."""


@dataclass(frozen=True)
class Objective:
    """Share-entropy objective: minmax, minsum or a single share."""

    kind: str
    players: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("minmax", "minsum", "single"):
            raise StructureError(f"unknown objective kind {self.kind!r}")
        if not self.players:
            raise StructureError("objective needs at least one player")
        if self.kind == "single" and len(self.players) != 1:
            raise StructureError("single-share objective takes exactly one player")

    @classmethod
    def parse(cls, spec: str, default_players: Sequence[int]) -> "Objective":
        if spec.startswith("single:"):
            return cls("single", (int(spec.split(":", 1)[1]),))
        return cls(spec, tuple(default_players))

    def describe(self) -> str:
        players = ",".join(str(p) for p in self.players)
        return f"{self.kind} over players {players}"

    def to_json_dict(self) -> dict:
        if self.kind == "single":
            return {"kind": "single", "player": self.players[0]}
        return {"kind": self.kind, "players": list(self.players)}


@dataclass(frozen=True)
class BoundReport:
    """Proved lower bound on the largest share entropy, with certificate."""

    structure: AccessStructure
    purified: bool
    k: int | None
    theorem3_bound: Fraction | None
    mode: str
    ineq: str
    objective: Objective
    lp_value: Fraction
    rate_upper_bound: Fraction
    certificate: Certificate
    rows: int
    cols: int
    pivots: int
    millis: int

    def to_json_dict(self) -> dict:
        return {
            "structure": structure_to_dict(self.structure),
            "purified": self.purified,
            "k": self.k,
            "theorem3_bound": None if self.theorem3_bound is None else rat_str(self.theorem3_bound),
            "mode": self.mode,
            "ineq": self.ineq,
            "objective": self.objective.to_json_dict(),
            "lp_value": rat_str(self.lp_value),
            "rate_upper_bound": rat_str(self.rate_upper_bound),
            "certificate": certificate_to_json_dict(self.certificate),
            "stats": {
                "rows": self.rows,
                "cols": self.cols,
                "pivots": self.pivots,
                "millis": self.millis,
            },
        }


def certificate_to_json_dict(cert: Certificate) -> dict:
    return {
        "claimed_bound": rat_str(cert.claimed_bound),
        "entries": [
            {"id": rid, "mult": rat_str(mult)} for rid, mult in cert.entries
        ],
    }


def certificate_from_json_dict(data: dict) -> Certificate:
    return Certificate(
        claimed_bound=Fraction(data["claimed_bound"]),
        entries=tuple((e["id"], Fraction(e["mult"])) for e in data["entries"]),
        objective=(),
    )


@lru_cache(maxsize=16)
def cached_system(structure: AccessStructure, pure: bool, ineq: str) -> ConstraintSystem:
    return build_system(structure, pure=pure, ineq=ineq)


def _system_rows(system: ConstraintSystem) -> tuple[LPRow, ...]:
    return tuple(LPRow(c.id, c.terms, c.rel, c.rhs) for c in system.constraints)


def objective_rows(
    system: ConstraintSystem, objective: Objective
) -> tuple[tuple[LPRow, ...], tuple[tuple[int, Fraction], ...], int]:
    """Extra linking rows, minimized form and variable count for a bound LP."""
    ground = system.ground
    for p in objective.players:
        if not 1 <= p <= ground.players:
            raise StructureError(f"objective player {p} outside 1..{ground.players}")
    if objective.kind == "minmax":
        t_var = ground.var_count
        extra = tuple(
            LPRow(
                f"objlink:{i}",
                ((1 << (i - 1), -ONE), (t_var, ONE)),
                ">=",
                ZERO,
            )
            for i in objective.players
        )
        return extra, ((t_var, ONE),), ground.var_count + 1
    terms: dict[int, Fraction] = {}
    for i in objective.players:
        mask = 1 << (i - 1)
        terms[mask] = terms.get(mask, ZERO) + 1
    form = tuple(sorted(terms.items()))
    return (), form, ground.var_count


def _check_limit(total_elements: int, max_elements: int, force: bool) -> None:
    if total_elements > max_elements and not force:
        raise CapacityError(
            f"{total_elements} ground elements exceed the default limit "
            f"{max_elements}; pass force=True (--force) for long runs"
        )


def share_bound(
    structure: AccessStructure,
    *,
    auto_purify: bool = False,
    mode: str = "pure",
    ineq: str = "full",
    objective: str | Objective = "minmax",
    players: Iterable[int] | None = None,
    max_elements: int = DEFAULT_ELEMENT_LIMIT,
    force: bool = False,
) -> BoundReport:
    """Exact lower bound on max share entropy, in units of the secret.

    Builds the constraint system for the structure (purifying first when
    ``auto_purify`` is set and the structure is not self-dual), attaches
    the requested objective and solves.  The report carries the exact
    optimum, its reciprocal as an upper bound on the information rate,
    and a replayable certificate (verified before returning).
    """
    if mode not in ("pure", "mixed"):
        raise StructureError(f"unknown mode {mode!r}")
    if not is_quantum(structure):
        raise StructureError("share bounds require a quantum access structure")
    started = time.perf_counter()
    solved = structure
    purified = False
    if mode == "pure" and not is_self_dual(structure):
        if not auto_purify:
            raise StructureError(
                "pure mode needs a self-dual structure; enable auto_purify"
            )
        solved = purify(structure)
        purified = True
    _check_limit(solved.n + 1, max_elements, force)

    system = cached_system(solved, mode == "pure", ineq)
    if isinstance(objective, str):
        selected = tuple(players) if players is not None else tuple(range(1, solved.n + 1))
        obj = Objective.parse(objective, selected)
    else:
        obj = objective

    extra, form, num_vars = objective_rows(system, obj)
    rows = _system_rows(system) + extra
    problem = LPProblem(num_vars, form, rows)
    solution = solve(problem)
    if solution.status != "optimal":
        raise ProverError(
            f"bound solve ended {solution.status}; the scheme constraints "
            "should always admit a bounded optimum"
        )
    cert = extract_certificate(problem, solution, description=obj.describe())
    if not verify_certificate(system, cert, objective=obj):
        raise ProverError("emitted certificate failed independent replay")

    k = _csirmaz_k_of(structure)
    return BoundReport(
        structure=solved,
        purified=purified,
        k=k,
        theorem3_bound=None if k is None else theorem3_reference_bound(k),
        mode=mode,
        ineq=ineq,
        objective=obj,
        lp_value=solution.value,
        rate_upper_bound=1 / solution.value,
        certificate=cert,
        rows=len(rows),
        cols=num_vars,
        pivots=solution.pivots,
        millis=int((time.perf_counter() - started) * 1000),
    )


def _csirmaz_k_of(structure: AccessStructure) -> int | None:
    """k when the input is a staircase instance or its purification."""
    if structure.n >= 4:
        ref, params = csirmaz(structure.n)
        if ref == structure:
            return params.k
    if structure.n >= 5:
        ref, params = csirmaz(structure.n - 1)
        if purify(ref) == structure:
            return params.k
    return None


def verify_certificate(
    system: ConstraintSystem,
    cert: Certificate,
    *,
    objective: Objective | Iterable[tuple[int, Fraction]],
) -> bool:
    """Replay a certificate by exact arithmetic, no solver involved.

    Accepts iff multipliers on inequality rows are nonnegative, the
    weighted row forms add up exactly to the minimized objective form,
    and the weighted right-hand sides reach the claimed bound.  Unknown
    row ids raise; sign violations and mismatches just reject.
    """
    if isinstance(objective, Objective):
        extra, form, _ = objective_rows(system, objective)
        rows_by_id = dict(system.by_id)
        for row in extra:
            rows_by_id[row.id] = LinearConstraint(row.id, "objlink", row.terms, row.rel, row.rhs)
    else:
        form = tuple(objective)
        rows_by_id = system.by_id

    combo: dict[int, Fraction] = {}
    total_rhs = ZERO
    for rid, mult in cert.entries:
        row = rows_by_id.get(rid)
        if row is None:
            raise KeyError(f"certificate references unknown constraint {rid!r}")
        if row.rel != "=" and mult < 0:
            return False
        if not mult:
            continue
        total_rhs += mult * row.rhs
        for v, c in row.terms:
            nv = combo.get(v, ZERO) + mult * c
            if nv:
                combo[v] = nv
            else:
                combo.pop(v, None)
    target = {v: c for v, c in form if c}
    if combo != target:
        return False
    return total_rhs >= cert.claimed_bound


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one implied-inequality check."""

    implied: bool
    certificates: tuple[Certificate, ...]
    witness: dict[int, Fraction] | None
    pivots: int


def check_implied(
    system: ConstraintSystem,
    terms: dict[int, Fraction] | Iterable[tuple[int, Fraction]],
    rel: str,
    rhs: Fraction,
    *,
    use_fast_path: bool = True,
) -> CheckResult:
    """Is ``terms . S rel rhs`` a consequence of the system?

    Implied iff the minimum of the left-hand side over the feasible
    region reaches the right-hand side (both directions for an
    equality); returns the dual certificates, or a feasible entropy
    vector refuting the target (re-validated against every constraint).
    """
    if rel not in (">=", "="):
        raise StructureError(f"unsupported target relation {rel!r}")
    base = dict(terms)
    base = {v: c for v, c in base.items() if c}
    directions = [(base, Fraction(rhs))]
    if rel == "=":
        directions.append(({v: -c for v, c in base.items()}, -Fraction(rhs)))

    certificates = []
    pivots = 0
    for form, bound in directions:
        cert, witness, used = _prove_direction(system, form, bound, use_fast_path)
        pivots += used
        if cert is None:
            return CheckResult(False, (), witness, pivots)
        certificates.append(cert)
    return CheckResult(True, tuple(certificates), None, pivots)


def _prove_direction(
    system: ConstraintSystem,
    form: dict[int, Fraction],
    bound: Fraction,
    use_fast_path: bool,
):
    """Try to certify form . S >= bound; return (cert, witness, pivots)."""
    objective = tuple(sorted(form.items()))
    pivots = 0
    if use_fast_path and system.ineq == "full":
        sibling = cached_system(system.structure, system.pure, "elemental")
        problem = LPProblem(sibling.ground.var_count, objective, _system_rows(sibling))
        solution = solve(problem)
        pivots += solution.pivots
        if solution.status == "optimal" and solution.value >= bound:
            cert = Certificate(bound, extract_certificate(problem, solution).entries, objective)
            if verify_certificate(system, cert, objective=objective):
                return cert, None, pivots

    problem = LPProblem(system.ground.var_count, objective, _system_rows(system))
    solution = solve(problem)
    pivots += solution.pivots
    if solution.status == "optimal" and solution.value >= bound:
        cert = Certificate(bound, extract_certificate(problem, solution).entries, objective)
        if not verify_certificate(system, cert, objective=objective):
            raise ProverError("optimal certificate failed replay")
        return cert, None, pivots
    if solution.status == "optimal":
        witness = _as_point(system, solution.primal)
    elif solution.status == "unbounded":
        witness = _witness_below(system, objective, bound)
    else:
        raise ProverError("implication system is infeasible; cannot check targets")
    _validate_witness(system, witness)
    return None, witness, pivots


def _witness_below(system, objective, bound):
    """Feasible point with objective value strictly below the bound."""
    cutoff = LPRow(
        "cutoff", tuple((v, -c) for v, c in objective), ">=", -(bound - 1)
    )
    problem = LPProblem(
        system.ground.var_count, (), _system_rows(system) + (cutoff,)
    )
    solution = solve(problem)
    if solution.status != "optimal":
        raise ProverError("failed to materialize a refutation witness")
    return _as_point(system, solution.primal)


def _as_point(system, primal) -> dict[int, Fraction]:
    return {v: primal[v] for v in range(system.ground.var_count)}


def _validate_witness(system: ConstraintSystem, point: dict[int, Fraction]) -> None:
    for c in system.constraints:
        if not c.satisfied_by(point):
            raise ProverError(f"refutation witness violates {c.id}")


@dataclass(frozen=True)
class SuiteInstance:
    """One linear target with a stable id and a printable description."""

    id: str
    description: str
    terms: tuple[tuple[int, Fraction], ...]
    rel: str
    rhs: Fraction


@dataclass(frozen=True)
class SuiteOutcome:
    instance: SuiteInstance
    implied: bool
    pivots: int


@dataclass(frozen=True)
class SuiteReport:
    structure: AccessStructure
    ineq: str
    outcomes: tuple[SuiteOutcome, ...]
    millis: int

    @property
    def all_implied(self) -> bool:
        return all(o.implied for o in self.outcomes)

    def failures(self) -> list[SuiteOutcome]:
        return [o for o in self.outcomes if not o.implied]

    def to_json_dict(self) -> dict:
        return {
            "structure": structure_to_dict(self.structure),
            "ineq": self.ineq,
            "total": len(self.outcomes),
            "implied": sum(o.implied for o in self.outcomes),
            "all_implied": self.all_implied,
            "instances": [
                {
                    "id": o.instance.id,
                    "description": o.instance.description,
                    "implied": o.implied,
                }
                for o in self.outcomes
            ],
            "stats": {"millis": self.millis},
        }


def _form(*entries: tuple[int, Fraction | int]) -> tuple[tuple[int, Fraction], ...]:
    terms: dict[int, Fraction] = {}
    for mask, coef in entries:
        if mask == 0:
            continue
        nv = terms.get(mask, ZERO) + coef
        if nv:
            terms[mask] = nv
        else:
            terms.pop(mask, None)
    return tuple(sorted(terms.items()))


def scheme_relation_instances(structure: AccessStructure, ground: GroundSet) -> list[SuiteInstance]:
    """Every derivable scheme relation of the model for this structure.

    For each authorized A the three joint-entropy relations with its
    complement; for every subset the joint-entropy-with-reference case
    split; for every authorized pair with unauthorized intersection the
    submodularity-with-gap inequality.
    """
    instances: list[SuiteInstance] = []
    pmask = ground.player_mask
    r = ground.reference_mask
    authorized = [
        m for m in range(1, pmask + 1) if structure.mask_authorized(m)
    ]
    for a in authorized:
        abar = pmask & ~a
        lbl = ground.label(a)
        # S(A) = I(A:comp)/2 + 1, S(comp) = I(A:comp)/2, S(A) - S(comp) = 1
        mutual = _form((a, ONE), (abar, ONE), (pmask, -ONE))
        instances.append(
            SuiteInstance(
                f"joint1:{lbl}",
                f"2*S({lbl}) - I({lbl}:complement) = 2",
                _form((a, Fraction(2)), *((m, -c) for m, c in mutual)),
                "=",
                Fraction(2),
            )
        )
        instances.append(
            SuiteInstance(
                f"joint2:{lbl}",
                f"2*S(complement of {lbl}) - I({lbl}:complement) = 0",
                _form((abar, Fraction(2)), *((m, -c) for m, c in mutual)),
                "=",
                ZERO,
            )
        )
        instances.append(
            SuiteInstance(
                f"joint3:{lbl}",
                f"S({lbl}) - S(complement) = 1",
                _form((a, ONE), (abar, -ONE)),
                "=",
                ONE,
            )
        )
    for a in range(1, pmask + 1):
        lbl = ground.label(a)
        auth = structure.mask_authorized(a)
        sign = -ONE if auth else ONE
        word = "-" if auth else "+"
        instances.append(
            SuiteInstance(
                f"withref:{lbl}",
                f"S({lbl},R) = S({lbl}) {word} 1",
                _form((a | r, ONE), (a, -ONE)),
                "=",
                sign,
            )
        )
    for i, a in enumerate(authorized):
        for b in authorized[i + 1:]:
            meet = a & b
            if structure.mask_authorized(meet):
                continue
            la, lb = ground.label(a), ground.label(b)
            instances.append(
                SuiteInstance(
                    f"gap:{la};{lb}",
                    f"S({la})+S({lb}) >= S(union)+S(intersection)+2",
                    _form((a, ONE), (b, ONE), (a | b, -ONE), (meet, -ONE)),
                    ">=",
                    Fraction(2),
                )
            )
    return instances


def lemma_suite(
    structure: AccessStructure,
    *,
    ineq: str = "full",
    use_fast_path: bool = True,
    max_elements: int = DEFAULT_ELEMENT_LIMIT,
    force: bool = False,
) -> SuiteReport:
    """Check that every scheme relation is implied by the system.

    Requires a quantum, self-dual structure (the relations are stated in
    pure mode).  Expected outcome: every instance implied.
    """
    if not is_quantum(structure):
        raise StructureError("lemma checks require a quantum access structure")
    if not is_self_dual(structure):
        raise StructureError("lemma checks run in pure mode; purify first")
    _check_limit(structure.n + 1, max_elements, force)
    started = time.perf_counter()
    system = cached_system(structure, True, ineq)
    outcomes = []
    for inst in scheme_relation_instances(structure, system.ground):
        res = check_implied(
            system, dict(inst.terms), inst.rel, inst.rhs, use_fast_path=use_fast_path
        )
        outcomes.append(SuiteOutcome(inst, res.implied, res.pivots))
    return SuiteReport(
        structure=structure,
        ineq=ineq,
        outcomes=tuple(outcomes),
        millis=int((time.perf_counter() - started) * 1000),
    )


@dataclass(frozen=True)
class ChainReport:
    n: int
    k: int
    reference_bound: Fraction
    steps: tuple[SuiteOutcome, ...]
    bound: BoundReport
    millis: int

    @property
    def all_implied(self) -> bool:
        return all(s.implied for s in self.steps)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "theorem3_bound": rat_str(self.reference_bound),
            "all_implied": self.all_implied,
            "steps": [
                {
                    "id": s.instance.id,
                    "description": s.instance.description,
                    "implied": s.implied,
                }
                for s in self.steps
            ],
            "lp_value": rat_str(self.bound.lp_value),
            "rate_upper_bound": rat_str(self.bound.rate_upper_bound),
            "stats": {"millis": self.millis},
        }


def staircase_chain_instances(n: int) -> tuple[AccessStructure, int, list[SuiteInstance]]:
    """Purified staircase structure plus the telescoping proof steps."""
    structure, params = csirmaz(n)
    purified = purify(structure)
    if purified is structure:
        raise StructureError("staircase structure is unexpectedly self-dual")
    k = params.k
    a0 = params.a_sets[0].bits
    pmask = (1 << n) - 1
    purifier_bit = 1 << (purified.n - 1)
    count = 2 ** k - 1
    instances = []
    for i in range(count - 1):
        bi = params.b_sets[i].bits
        bj = params.b_sets[i + 1].bits
        instances.append(
            SuiteInstance(
                f"step:{i}",
                f"S(A,B_{i})+S(B_{i + 1}) >= S(A,B_{i + 1})+S(B_{i})+2",
                _form((a0 | bi, ONE), (bj, ONE), (a0 | bj, -ONE), (bi, -ONE)),
                ">=",
                Fraction(2),
            )
        )
    b_last = params.b_sets[-1].bits
    instances.append(
        SuiteInstance(
            "telescoped",
            f"S(A)+S(B) >= S(A,B)+{(count - 1) * 2}",
            _form((a0, ONE), (b_last, ONE), (pmask, -ONE)),
            ">=",
            Fraction((count - 1) * 2),
        )
    )
    final_rhs = 2 ** (k + 1) - 1
    instances.append(
        SuiteInstance(
            "final",
            f"2*S(A)+S(purifier) >= {final_rhs}",
            _form((a0, Fraction(2)), (purifier_bit, ONE)),
            ">=",
            Fraction(final_rhs),
        )
    )
    return purified, k, instances


def theorem3_chain(
    n: int,
    *,
    ineq: str = "full",
    use_fast_path: bool = True,
    max_elements: int = DEFAULT_ELEMENT_LIMIT,
    force: bool = False,
) -> ChainReport:
    """Replay the telescoping share-size argument for the staircase family.

    Checks each per-step inequality, the telescoped sum and the final
    bound 2*S(A)+S(purifier) >= (2^(k+1)-1) on the purified structure,
    each as an implied inequality of the constraint system; also solves
    the minmax bound and reports it next to the closed-form reference.
    """
    purified, k, instances = staircase_chain_instances(n)
    _check_limit(purified.n + 1, max_elements, force)
    started = time.perf_counter()
    system = cached_system(purified, True, ineq)
    steps = []
    for inst in instances:
        res = check_implied(
            system, dict(inst.terms), inst.rel, inst.rhs, use_fast_path=use_fast_path
        )
        steps.append(SuiteOutcome(inst, res.implied, res.pivots))
    bound = share_bound(
        purified, mode="pure", ineq=ineq, max_elements=max_elements, force=force
    )
    return ChainReport(
        n=n,
        k=k,
        reference_bound=theorem3_reference_bound(k),
        steps=tuple(steps),
        bound=bound,
        millis=int((time.perf_counter() - started) * 1000),
    )
