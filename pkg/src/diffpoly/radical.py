"""Finite checks around idempotents in iterated differential polynomial rings.

* :func:`find_filtration` builds ``0 = V_0 ⊆ ... ⊆ V_h = V`` with ``S V_l ⊆ V_{l-1}``
  for a nilpotent subalgebra S acting on V by left multiplication.
* :func:`build_scenario` checks a tower against the standing hypotheses (derivations,
  R-invariance, nilpotent R, well-defined extensions) and returns an audit transcript.
* :func:`lemma13_check` constructs the sets A, B, C for an idempotent
  ``e = sum X^alpha a_alpha``, tests ``C ⊆ N`` and replays the filtration
  induction inside the Ore ring.
* :func:`truncated_idempotent_scan` enumerates bounded-degree elements over R
  and returns the idempotents among them.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .algebra import (
    AlgElem,
    Derivation,
    FiniteAlgebra,
    Subspace,
    SearchTooLargeError,
    DEFAULT_SEARCH_LIMIT,
    adjoin_unit,
    check_leibniz,
    inner_derivation,
    is_nilpotent,
    kernel_of_left_action,
    leibniz_witness,
    power_spans,
    subalgebra_closure,
)
from .commcalc import PreconditionError
from .freealg import commutator_k, multi_commutator
from .ore import (
    DerivationTower,
    InternalConsistencyError,
    OrePoly,
    TowerLevel,
    lemma12_rewrite,
    multidegrees_upto,
)

__all__ = [
    "Filtration",
    "find_filtration",
    "TowerSpec",
    "AuditCheck",
    "AuditReport",
    "ScenarioError",
    "ScenarioInstance",
    "build_scenario",
    "Lemma13Sets",
    "Lemma13Verdict",
    "lemma13_sets",
    "lemma13_check",
    "bracket_claim_violation",
    "ScanReport",
    "truncated_idempotent_scan",
    "AUDIT_CHECKS",
]


# filtration -------------------------------------------------------------------------------


@dataclass
class Filtration:
    chain: list  # V_0 .. V_h as Subspaces of the acting algebra
    S: Subspace

    @property
    def h(self) -> int:
        return len(self.chain) - 1

    def check(self) -> bool:
        for l in range(1, len(self.chain)):
            for s in self.S.basis():
                for v in self.chain[l].basis():
                    if not self.chain[l - 1].contains(s * v):
                        return False
        return all(self.chain[l - 1].is_subspace_of(self.chain[l]) for l in range(1, len(self.chain)))


def find_filtration(S: Subspace, V: FiniteAlgebra | None = None) -> Filtration:
    """``V_l = {v : every l-fold product from S kills v}`` under the regular action."""
    V = V if V is not None else S.parent
    if S.parent != V:
        raise ValueError("S must be a subspace of the algebra it acts on")
    h = is_nilpotent(S)
    if h is None:
        raise PreconditionError("S is not nilpotent, no filtration exists")
    powers = power_spans(S)
    chain = [Subspace.zero(V)]
    for l in range(1, h + 1):
        Sl = powers[l - 1] if l - 1 < len(powers) else Subspace.zero(V)
        chain.append(kernel_of_left_action(Sl.basis(), V))
    filt = Filtration(chain, S)
    if not filt.check():
        raise InternalConsistencyError("constructed chain violates S V_l ⊆ V_(l-1)")
    return filt


# scenarios and audits -----------------------------------------------------------------------

AUDIT_CHECKS = ("leibniz", "restricts_to_R", "x_values_in_R_star", "locally_nilpotent", "compatibility")


@dataclass
class TowerSpec:
    """Raw tower data, before validation.

    ``derivations[i]`` is a matrix over R* (rows = images of basis elements),
    a :class:`Derivation`, or ``None`` for zero. ``x_values[(i, j)]`` holds
    ``d_i(X_j)`` as R* coordinates or an element, 0-based with ``j < i``.
    """

    derivations: list = field(default_factory=list)
    x_values: dict = field(default_factory=dict)


@dataclass
class AuditCheck:
    name: str
    passed: bool
    detail: str = ""
    witness: str | None = None


@dataclass
class AuditReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def get(self, name: str) -> AuditCheck | None:
        return next((c for c in self.checks if c.name == name), None)

    def failures(self) -> list[AuditCheck]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> list[dict]:
        return [
            {"check": c.name, "passed": c.passed, "detail": c.detail, "witness": c.witness} for c in self.checks
        ]

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            w = f" [witness: {c.witness}]" if c.witness else ""
            lines.append(f"{tag} {c.name}: {c.detail}{w}")
        return "\n".join(lines)


class ScenarioError(ValueError):
    def __init__(self, report: AuditReport):
        super().__init__("scenario cannot be built:\n" + str(report))
        self.report = report


@dataclass
class ScenarioInstance:
    """A tower plus the coefficient data of a candidate ``e = sum X^alpha a_alpha``."""

    tower: DerivationTower
    coefficients: dict = field(default_factory=dict)  # multidegree -> AlgElem in R*
    bounds: tuple = ()
    audit: AuditReport = field(default_factory=AuditReport)
    name: str = ""

    def __post_init__(self):
        T = self.tower
        self.coefficients = {tuple(k): T.coeff(v) for k, v in self.coefficients.items()}
        if not self.bounds:
            self.bounds = tuple(
                max((d[j] for d in self.coefficients), default=0) for j in range(T.n)
            )
        self.bounds = tuple(self.bounds)
        if len(self.bounds) != T.n:
            raise ValueError("bounds must have one entry per variable")
        for d in self.coefficients:
            if any(a > b for a, b in zip(d, self.bounds)):
                raise ValueError(f"coefficient degree {d} exceeds bounds {self.bounds}")

    @property
    def representation(self) -> FiniteAlgebra:
        return self.tower.hull

    @property
    def xs(self) -> list[OrePoly]:
        return [self.tower.var(j) for j in range(self.tower.n)]

    @property
    def valid(self) -> bool:
        return self.audit.passed

    def e(self) -> OrePoly:
        return self.tower.poly(self.coefficients)

    def with_element(self, e: OrePoly, bounds: Sequence[int] | None = None) -> "ScenarioInstance":
        return ScenarioInstance(self.tower, e.terms, tuple(bounds) if bounds else (), self.audit, self.name)


def _derivation_from(entry, hull) -> Derivation:
    if entry is None:
        return Derivation.zero(hull)
    if isinstance(entry, Derivation):
        return entry
    if isinstance(entry, Mapping) and "inner" in entry:
        return inner_derivation(hull.element(entry["inner"]))
    return Derivation(hull, entry, check=False)


def build_scenario(
    R: FiniteAlgebra,
    tower_spec: TowerSpec,
    coefficients: Mapping | None = None,
    bounds: Sequence[int] | None = None,
    name: str = "",
    strict: bool = False,
) -> ScenarioInstance:
    """Validate a tower over R and return the instance with its audit transcript.

    Checks: (1) each d_i is a derivation of R*, (2) d_i maps R into R,
    (3) d_i(X_j) are well-formed elements of R*, (4) R is nilpotent (hence
    locally nilpotent), (5) the Leibniz extensions respect the ring relations.
    Failures are reported, not raised, unless ``strict`` is set or the data
    are too malformed to build a tower at all.
    """
    if R.is_unital:
        raise ValueError("base ring R must be given without a unit")
    hull = adjoin_unit(R)
    p = R.modulus
    n = len(tower_spec.derivations)
    report = AuditReport()

    # (3) structural check on d_i(X_j), done first because the tower needs it
    bad3 = None
    xvals: dict = {}
    for key, val in tower_spec.x_values.items():
        i, j = key
        if not (0 <= j < i < n):
            bad3 = (f"d_{i + 1}(X_{j + 1})", f"index pair out of range for n={n} (need j < i)")
            break
        if isinstance(val, AlgElem) and val.parent == R:
            val = hull.embed(val)
        coords = val.coords if isinstance(val, AlgElem) else val
        if isinstance(val, AlgElem) and val.parent != hull:
            bad3 = (f"d_{i + 1}(X_{j + 1})", "element of a different algebra")
            break
        if (
            not isinstance(coords, (list, tuple))
            or len(coords) != hull.dim
            or not all(isinstance(c, int) and 0 <= c < p for c in coords)
        ):
            bad3 = (f"d_{i + 1}(X_{j + 1})", f"not a vector of {hull.dim} residues mod {p}")
            break
        xvals[(i, j)] = hull.element(coords)
    if bad3:
        report.checks.append(AuditCheck("x_values_in_R_star", False, bad3[1], bad3[0]))
    else:
        report.checks.append(
            AuditCheck("x_values_in_R_star", True, f"{len(xvals)} values d_i(X_j), all in R*")
        )

    try:
        derivs = [_derivation_from(d, hull) for d in tower_spec.derivations]
    except Exception as exc:  # malformed matrices
        report.checks.append(AuditCheck("leibniz", False, f"malformed derivation: {exc}"))
        raise ScenarioError(report) from None

    # (1) Leibniz on R*
    fails = []
    for i, d in enumerate(derivs):
        w = leibniz_witness(d, hull)
        if w is not None:
            fails.append((i, f"({hull.labels[w[0]]}, {hull.labels[w[1]]})"))
    if fails:
        i, pair = fails[0]
        report.checks.append(AuditCheck("leibniz", False, f"d_{i + 1} violates Leibniz", f"d_{i + 1} on {pair}"))
    else:
        report.checks.append(AuditCheck("leibniz", True, f"{n} derivations satisfy Leibniz on R*"))

    # (2) d_i(R) ⊆ R
    leak = None
    for i, d in enumerate(derivs):
        for k in range(R.dim):
            img = d(hull.basis(k))
            if not hull.in_base(img):
                leak = (i, R.labels[k])
                break
        if leak:
            break
    if leak:
        report.checks.append(
            AuditCheck("restricts_to_R", False, f"d_{leak[0] + 1} leaves R", leak[1])
        )
    else:
        report.checks.append(AuditCheck("restricts_to_R", True, "every d_i maps R into R"))

    # (4) local nilpotency of R
    nil = is_nilpotent(subalgebra_closure(R.basis_elements(), R)) if R.dim else 1
    if nil is None:
        idem = next((b for b in R.basis_elements() if b * b == b and not b.is_zero()), None)
        report.checks.append(
            AuditCheck(
                "locally_nilpotent",
                False,
                "powers of R stabilize at a nonzero subspace",
                str(idem) if idem is not None else None,
            )
        )
    else:
        report.checks.append(AuditCheck("locally_nilpotent", True, f"R^{nil} = 0"))

    if bad3:
        raise ScenarioError(report)

    levels = [TowerLevel(d, tuple(xvals.get((i, j), hull.zero()) for j in range(i))) for i, d in enumerate(derivs)]
    tower = DerivationTower(R, levels, hull)

    # (5) extensions well defined
    cf = tower.compatibility_failures()
    if cf:
        report.checks.append(AuditCheck("compatibility", False, cf[0], cf[0]))
    else:
        report.checks.append(AuditCheck("compatibility", True, "extended derivations respect all relations"))

    order = {name: k for k, name in enumerate(AUDIT_CHECKS)}
    report.checks.sort(key=lambda c: order[c.name])
    if strict and not report.passed:
        raise ScenarioError(report)
    inst = ScenarioInstance(tower, dict(coefficients or {}), tuple(bounds or ()), report, name)
    return inst


# filtration argument for idempotents -------------------------------------------------------------


@dataclass
class Lemma13Sets:
    A: list  # AlgElem in R*
    B: list
    C: list
    stage_coefficients: list  # AlgElem: the c's produced by the stage rewrites
    bound_violation: str | None = None


def _dedupe(elems):
    seen, out = set(), []
    for x in elems:
        if x.coords not in seen:
            seen.add(x.coords)
            out.append(x)
    return out


def _constant_part(p: OrePoly) -> AlgElem:
    zero = (0,) * p.tower.n
    for d in p.terms:
        if d != zero:
            raise InternalConsistencyError(f"commutator with a variable left degree {d}")
    return p.coefficient(zero)


def lemma13_sets(instance: ScenarioInstance) -> Lemma13Sets:
    T = instance.tower
    n = T.n
    m = instance.bounds
    M = max(m, default=0)
    xs = instance.xs
    box = multidegrees_upto(m)

    def commutators_of(c: AlgElem) -> list:
        out = []
        cp = T.const(c)
        for j in range(n):
            for i in range(M + 1):
                out.append(_constant_part(commutator_k(cp, xs[j], i)))
        return out

    A: list = []
    current = [(d, a) for d, a in instance.coefficients.items() if not a.is_zero()]
    for _, a in current:
        A.extend(commutators_of(a))
    stage_cs: list = []
    for t in range(n - 1):
        nxt = {}
        for d, c in current:
            for k in range(m[t] + 1):
                res = lemma12_rewrite(T.monomial(d, c), t, k)
                for d2, c2 in res.coefficients.items():
                    nxt[(d2, c2.coords)] = (d2, c2)
        current = list(nxt.values())
        cs = [c for _, c in current]
        stage_cs.extend(cs)
        for c in cs:
            A.extend(commutators_of(c))
    A = [x for x in _dedupe(A) if not x.is_zero()]

    # B: coefficients of normal forms of products of [x_s, x_j]_w along x^alpha
    B: list = []
    violation = None
    q = {(s, j, w): commutator_k(xs[s], xs[j], w) for s in range(n) for j in range(n) for w in range(M + 1)}
    for alpha in box:
        letters = [s for s in range(n) for _ in range(alpha[s])]
        for j in range(n):
            prefix = {(): T.one()}
            for ws in itertools.product(range(M + 1), repeat=len(letters)):
                for t in range(len(ws)):
                    key = ws[: t + 1]
                    if key not in prefix:
                        prefix[key] = prefix[ws[:t]] * q[(letters[t], j, ws[t])]
                prod = prefix[ws]
                for d, b in prod.items():
                    if any(x > y for x, y in zip(d, alpha)) and violation is None:
                        violation = f"product for alpha={alpha}, j={j + 1}, w={ws} has degree {d}"
                    B.append(b)
    B = [x for x in _dedupe(B) if not x.is_zero()]
    C = [x for x in _dedupe(b * a for b in B for a in A) if not x.is_zero()]
    return Lemma13Sets(A, B, C, _dedupe(stage_cs), violation)


def bracket_claim_violation(instance: ScenarioInstance, S: Subspace) -> str | None:
    """Check that every ``[e, x]_k`` (k <= bounds) is ``sum_{i <= m} X^i c_i`` with c_i in S.

    Idempotency of e is not needed for this step. Returns a description of the
    first violation, or None.
    """
    e = instance.e()
    xs = instance.xs
    for k in multidegrees_upto(instance.bounds):
        for d, c in multi_commutator(e, xs, k).items():
            if any(a > b for a, b in zip(d, instance.bounds)) or not S.contains(c):
                return f"[e,x]_{k} has coefficient {c} at {d} outside S"
    return None


@dataclass
class Lemma13Verdict:
    status: str  # "e_is_zero" | "hypothesis_failure" | "counterexample"
    witness: str | None
    e_direct_zero: bool
    transcript: list = field(default_factory=list)
    sizes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "e_is_zero"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "witness": self.witness,
            "e_direct_zero": self.e_direct_zero,
            "sizes": self.sizes,
            "transcript": self.transcript,
        }


def lemma13_check(instance: ScenarioInstance, N: Subspace | None = None) -> Lemma13Verdict:
    """Run the nilpotent-filtration argument on a concrete idempotent.

    ``N`` is a nilpotent subalgebra of R*; when omitted, the subalgebra
    generated by C is used, and if that is not nilpotent no nilpotent N
    can contain C. The verdict ``e_is_zero`` is only returned when the
    replay succeeds and the direct computation agrees.
    """
    T = instance.tower
    hull = T.hull
    e = instance.e()
    if e * e != e:
        raise PreconditionError("e is not idempotent in the Ore ring")
    if N is not None:
        if N.parent != hull:
            raise ValueError("N must be a subspace of R*")
        if not N.is_closed() or is_nilpotent(N) is None:
            raise PreconditionError("N is not a nilpotent subalgebra")
    log: list[str] = []
    direct_zero = e.is_zero()
    sets = lemma13_sets(instance)
    sizes = {"A": len(sets.A), "B": len(sets.B), "C": len(sets.C)}
    log.append(f"|A|={sizes['A']} |B|={sizes['B']} |C|={sizes['C']}")

    def verdict(status, witness=None):
        if status == "e_is_zero" and not direct_zero:
            # never report a pass that the direct computation contradicts
            status, witness = "counterexample", f"replay passed but e = {e}"
        log.append(f"verdict: {status}" + (f" ({witness})" if witness else ""))
        return Lemma13Verdict(status, witness, direct_zero, log, sizes)

    if sets.bound_violation:
        return verdict("hypothesis_failure", sets.bound_violation)
    if N is None:
        N = subalgebra_closure(sets.C, hull)
        if is_nilpotent(N) is None:
            bad = next((c for c in sets.C if is_nilpotent(subalgebra_closure([c], hull)) is None), None)
            w = str(bad) if bad is not None else "subalgebra generated by C"
            log.append("subalgebra generated by C is not nilpotent")
            return verdict("hypothesis_failure", w)
        log.append(f"N = <C>, dim {N.dim}, nilpotent")
    for c in sets.C:
        if not N.contains(c):
            return verdict("hypothesis_failure", str(c))
    for c in sets.stage_coefficients:
        if not N.contains(c):
            return verdict("hypothesis_failure", f"stage coefficient {c}")
    log.append("C ⊆ N")

    S = subalgebra_closure(sets.C, hull)
    bad = bracket_claim_violation(instance, S)
    if bad:
        return verdict("counterexample", bad)
    box = multidegrees_upto(instance.bounds)
    xs = instance.xs
    brackets = {k: e * multi_commutator(e, xs, k) for k in box}
    log.append(f"claim: all {len(box)} brackets [e,x]_k have coefficients in S")

    filt = find_filtration(S, hull)
    for l in range(1, filt.h + 1):
        for v in filt.chain[l].basis():
            vp = T.const(v)
            for k, ebk in brackets.items():
                if not (ebk * vp).is_zero():
                    return verdict("counterexample", f"e[e,x]_{k} does not kill {v} in V_{l}")
        log.append(f"level {l}: e[e,x]_k kills V_{l} (dim {filt.chain[l].dim})")
    return verdict("e_is_zero")


# bounded idempotent scan ------------------------------------------------------------------------


@dataclass
class ScanReport:
    degree_bound: int
    candidates: int
    idempotents: list  # OrePoly
    wall_time: float

    @property
    def only_zero(self) -> bool:
        return len(self.idempotents) == 1 and self.idempotents[0].is_zero()

    def to_json(self) -> dict:
        return {
            "degree_bound": self.degree_bound,
            "candidates": self.candidates,
            "idempotents": [str(e) for e in self.idempotents],
            "only_zero": self.only_zero,
            "wall_time": round(self.wall_time, 6),
        }


def truncated_idempotent_scan(
    instance: ScenarioInstance | DerivationTower, degree_bound: int, limit: int = DEFAULT_SEARCH_LIMIT
) -> ScanReport:
    """All e over R with every multidegree <= degree_bound componentwise and e*e == e.

    Products are computed in full, not truncated.
    """
    T = instance.tower if isinstance(instance, ScenarioInstance) else instance
    R = T.base
    degs = multidegrees_upto([degree_bound] * T.n)
    size = (R.modulus**R.dim) ** len(degs)
    if size > limit:
        raise SearchTooLargeError(size, limit)
    t0 = time.perf_counter()
    elems = [T.hull.embed(r) for r in Subspace.full(R).elements()] if R.dim else [T.hull.zero()]
    found = []
    for choice in itertools.product(elems, repeat=len(degs)):
        e = OrePoly(T, dict(zip(degs, choice)))
        if e * e == e:
            found.append(e)
    found.sort(key=lambda p: [(d, a.coords) for d, a in p.items()])
    return ScanReport(degree_bound, size, found, time.perf_counter() - t0)
