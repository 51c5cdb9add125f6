"""Commutator expansions with explicit integer coefficients, and idempotent rewrites.

The expansion routines produce :class:`ExpansionCertificate` objects: a
left-hand side, a list of ``(coefficient, factors)`` pairs, and the verdict of
an exact symbolic subtraction in the free algebra. Coefficients for the
product rule ``[ab,c]_k`` are solved for, not assumed; the power and
multi-power expansions are then assembled from them by recursion.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, prod
from typing import Sequence

from ._linalg import QQ, rank, solve
from .algebra import AlgElem, Subspace, AlgebraError
from .freealg import NCPoly, commutator_k, gen, multi_commutator

__all__ = [
    "TermBudgetExceeded",
    "PreconditionError",
    "DEFAULT_TERM_BUDGET",
    "ExpansionCertificate",
    "expand_lemma6",
    "expand_lemma7",
    "expand_lemma8",
    "lemma9_expand",
    "Lemma10Solution",
    "lemma10_solve",
    "FactoredTerm",
    "Lemma11Rewrite",
    "lemma11_rewrite",
    "ZERO_HASH",
    "content_hash",
]

DEFAULT_TERM_BUDGET = 10**6


class TermBudgetExceeded(RuntimeError):
    def __init__(self, count: int, budget: int):
        super().__init__(f"symbolic expansion reached {count} terms, budget is {budget}")
        self.count = count
        self.budget = budget


class PreconditionError(ValueError):
    pass


def content_hash(p: NCPoly) -> str:
    return hashlib.sha256(str(p).encode()).hexdigest()


ZERO_HASH = content_hash(NCPoly())


def _guard(p: NCPoly, budget: int) -> NCPoly:
    if len(p) > budget:
        raise TermBudgetExceeded(len(p), budget)
    return p


@dataclass
class ExpansionCertificate:
    lemma: str
    params: dict
    lhs: NCPoly
    rhs_terms: list  # [(int coefficient, tuple of NCPoly factors)]
    coefficients: dict  # human-readable coefficient table, key -> int
    verified: bool = False
    difference_hash: str = ""
    extra: dict = field(default_factory=dict)

    def rhs(self) -> NCPoly:
        total = NCPoly()
        for c, factors in self.rhs_terms:
            term = NCPoly.one()
            for f in factors:
                term = term * f
            total = total + term * c
        return total

    def difference(self) -> NCPoly:
        return self.lhs - self.rhs()

    def verify(self, budget: int = DEFAULT_TERM_BUDGET) -> bool:
        diff = _guard(self.difference(), budget)
        self.difference_hash = content_hash(diff)
        self.verified = diff.is_zero()
        return self.verified

    def evaluate_sides(self, assignment, target) -> tuple[AlgElem, AlgElem]:
        """Evaluate lhs as a polynomial and rhs factor by factor."""
        from .freealg import evaluate

        left = evaluate(self.lhs, assignment, target)
        right = target.zero()
        for c, factors in self.rhs_terms:
            if not factors:
                val = target.one()
            else:
                val = evaluate(factors[0], assignment, target)
                for f in factors[1:]:
                    val = val * evaluate(f, assignment, target)
            right = right + val * c
        return left, right

    def to_json(self) -> dict:
        return {
            "lemma": self.lemma,
            "params": self.params,
            "coefficients": {str(k): v for k, v in self.coefficients.items()},
            "lhs_terms": len(self.lhs),
            "rhs_terms": len(self.rhs_terms),
            "verified": self.verified,
            "difference_hash": self.difference_hash,
            "difference_is_zero_hash": self.difference_hash == ZERO_HASH,
            **self.extra,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


# product rule ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _lemma6_solution(k: int) -> tuple[tuple[int, ...], int]:
    """Integers D_0..D_k solving ``[ab,c]_k = sum D_i [a,c]_i [b,c]_{k-i}``, and the system rank."""
    a, b, c = gen("a"), gen("b"), gen("c")
    lhs = commutator_k(a * b, c, k)
    cols = [commutator_k(a, c, i) * commutator_k(b, c, k - i) for i in range(k + 1)]
    words = sorted({w for p in cols + [lhs] for w in p.terms}, key=lambda w: (len(w), w))
    col_vecs = [[p.coefficient(w) for w in words] for p in cols]
    target = [lhs.coefficient(w) for w in words]
    x = solve(col_vecs, target, QQ)
    if x is None:
        raise AssertionError(f"product-rule expansion has no solution for k={k}")
    r = rank([list(row) for row in zip(*col_vecs)], QQ) if words else 0
    if any(v.denominator != 1 for v in x):
        raise AssertionError(f"non-integral product-rule coefficient for k={k}")
    return tuple(int(v) for v in x), r


def expand_lemma6(k: int, budget: int = DEFAULT_TERM_BUDGET) -> ExpansionCertificate:
    """``[ab,c]_k = sum_i D_i [a,c]_i [b,c]_{k-i}`` over free generators a, b, c."""
    if k < 0:
        raise ValueError("k must be non-negative")
    D, r = _lemma6_solution(k)
    a, b, c = gen("a"), gen("b"), gen("c")
    lhs = _guard(commutator_k(a * b, c, k), budget)
    rhs = [(D[i], (commutator_k(a, c, i), commutator_k(b, c, k - i))) for i in range(k + 1) if D[i]]
    cert = ExpansionCertificate(
        "6",
        {"k": k},
        lhs,
        rhs,
        {i: D[i] for i in range(k + 1)},
        extra={"unique": r == k + 1},
    )
    cert.verify(budget)
    return cert


def _lemma6_coeffs(k: int) -> tuple[int, ...]:
    return _lemma6_solution(k)[0]


# powers ------------------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _lemma7_table(r: int, s: int) -> dict:
    """Coefficients E_w (w a length-r tuple) for ``[a^r, b]_s``, by the inductive split."""
    if r == 0:
        return {(): 1} if s == 0 else {}
    out: dict = {}
    D = _lemma6_coeffs(s)
    for i in range(s + 1):
        if not D[i]:
            continue
        for w, e in _lemma7_table(r - 1, i).items():
            key = w + (s - i,)
            out[key] = out.get(key, 0) + D[i] * e
    return {w: e for w, e in sorted(out.items()) if e}


def _power_commutators(a: NCPoly, b: NCPoly, s: int) -> list[NCPoly]:
    return [commutator_k(a, b, w) for w in range(s + 1)]


def expand_lemma7(r: int, s: int, budget: int = DEFAULT_TERM_BUDGET) -> ExpansionCertificate:
    """``[a^r, b]_s = sum_w E_w [a,b]_{w_1} ... [a,b]_{w_r}``."""
    if r < 0 or s < 0:
        raise ValueError("r and s must be non-negative")
    a, b = gen("a"), gen("b")
    table = _lemma7_table(r, s)
    coms = _power_commutators(a, b, s)
    lhs = _guard(commutator_k(a**r, b, s), budget)
    rhs = [(e, tuple(coms[x] for x in w)) for w, e in table.items()]
    cert = ExpansionCertificate("7", {"r": r, "s": s}, lhs, rhs, dict(table))
    cert.extra["weights_sum_to_s"] = all(sum(w) == s for w in table)
    cert.verify(budget)
    return cert


@lru_cache(maxsize=None)
def _lemma8_table(degs: tuple, s: int) -> dict:
    """Keys are tuples of w-tuples, one per generator a_1..a_n."""
    if len(degs) == 1:
        return {(w,): e for w, e in _lemma7_table(degs[0], s).items()}
    out: dict = {}
    D = _lemma6_coeffs(s)
    head, last = degs[:-1], degs[-1]
    for j in range(s + 1):
        if not D[j]:
            continue
        left = _lemma8_table(head, j)
        right = _lemma7_table(last, s - j)
        for wl, el in left.items():
            for wr, er in right.items():
                key = wl + (wr,)
                out[key] = out.get(key, 0) + D[j] * el * er
    return {k: v for k, v in sorted(out.items()) if v}


def expand_lemma8(degs: Sequence[int], s: int, budget: int = DEFAULT_TERM_BUDGET) -> ExpansionCertificate:
    """``[a_1^{i_1}...a_n^{i_n}, b]_s`` as a combination of products of ``[a_t, b]_w``."""
    degs = tuple(int(x) for x in degs)
    if not degs or any(x < 0 for x in degs) or s < 0:
        raise ValueError("need a non-empty multidegree of non-negative integers and s >= 0")
    if len(degs) == 1:
        cert = expand_lemma7(degs[0], s, budget)
        cert.lemma = "8"
        cert.params = {"i": list(degs), "s": s}
        return cert
    n = len(degs)
    a = [gen("a", t + 1) for t in range(n)]
    b = gen("b")
    # a rough upper bound on rhs size before building anything
    estimate = prod((s + 1) ** x for x in degs)
    if estimate > budget:
        raise TermBudgetExceeded(estimate, budget)
    table = _lemma8_table(degs, s)
    coms = [_power_commutators(a[t], b, s) for t in range(n)]
    mono = NCPoly.one()
    for t in range(n):
        mono = mono * a[t] ** degs[t]
    lhs = _guard(commutator_k(mono, b, s), budget)
    rhs = []
    for key, e in table.items():
        factors = tuple(coms[t][w] for t in range(n) for w in key[t])
        rhs.append((e, factors))
    cert = ExpansionCertificate("8", {"i": list(degs), "s": s}, lhs, rhs, dict(table))
    cert.verify(budget)
    return cert


# idempotent expansion ------------------------------------------------------------------------


def lemma9_expand(ns: Sequence[int], budget: int = DEFAULT_TERM_BUDGET) -> ExpansionCertificate:
    """``e x^n = sum_i prod_j C(n_j, i_j) x^i [e, x]_{n-i}`` over generators e, x_1..x_p."""
    ns = tuple(int(x) for x in ns)
    if any(x < 0 for x in ns):
        raise ValueError("exponents must be non-negative")
    p = len(ns)
    e = gen("e")
    xs = [gen("x", t + 1) for t in range(p)]
    lhs = e
    for t in range(p):
        lhs = lhs * xs[t] ** ns[t]
    rhs = []
    table = {}
    for idx in itertools.product(*(range(x + 1) for x in ns)):
        coef = prod(comb(n, i) for n, i in zip(ns, idx))
        table[idx] = coef
        xpow = NCPoly.one()
        for t in range(p):
            xpow = xpow * xs[t] ** idx[t]
        com = multi_commutator(e, xs, [n - i for n, i in zip(ns, idx)])
        rhs.append((coef, (xpow, com)))
    cert = ExpansionCertificate("9", {"n": list(ns)}, _guard(lhs, budget), rhs, table)
    cert.verify(budget)
    return cert


# linear solve for existential coefficients -------------------------------------------------------


@dataclass
class Lemma10Solution:
    ks: tuple
    solved: bool
    coefficients: dict | None  # multi-index -> AlgElem
    lhs: AlgElem
    residual: AlgElem | None
    finding: str = ""

    @property
    def residual_is_zero(self) -> bool:
        return self.residual is not None and self.residual.is_zero()


def _check_idempotent(e: AlgElem):
    if e * e != e:
        raise PreconditionError(f"e is not idempotent: e*e = {e * e}, e = {e}")


def lemma10_solve(
    e: AlgElem, xs: Sequence[AlgElem], ks: Sequence[int], R_space: Subspace | None = None
) -> Lemma10Solution:
    """Find ``r_i`` in R_space with ``[e, x]_k = sum_{i <= k} r_i e [e, x]_i``.

    Unknowns are the coordinates of each ``r_i`` in a basis of R_space; the
    system is solved over Z/p and free variables are set to zero.
    """
    A = e.parent
    _check_idempotent(e)
    ks = tuple(int(k) for k in ks)
    if len(ks) != len(xs):
        raise ValueError("need one index per x")
    field_ = A.field
    if R_space is None:
        R_space = Subspace.full(A)
    lhs = multi_commutator(e, list(xs), ks)
    indices = list(itertools.product(*(range(k + 1) for k in ks)))
    basis = R_space.basis()
    trailing = {i: e * multi_commutator(e, list(xs), i) for i in indices}
    cols, labels = [], []
    for i in indices:
        for t, s in enumerate(basis):
            cols.append(list((s * trailing[i]).coords))
            labels.append((i, t))
    x = solve(cols, list(lhs.coords), field_)
    if x is None:
        return Lemma10Solution(ks, False, None, lhs, None, "no solution with coefficients in the given subspace")
    coeffs = {i: A.zero() for i in indices}
    for (i, t), lam in zip(labels, x):
        if lam:
            coeffs[i] = coeffs[i] + basis[t] * int(lam)
    recon = A.zero()
    for i in indices:
        recon = recon + coeffs[i] * trailing[i]
    return Lemma10Solution(ks, True, coeffs, lhs, lhs - recon)


# combined rewrite ------------------------------------------------------------------------------


@dataclass(frozen=True)
class FactoredTerm:
    scalar: int  # product of binomial coefficients
    x_power: tuple  # multidegree of the x-prefix
    r: AlgElem
    k: tuple  # trailing index; the term ends in e [e, x]_k
    trailing: AlgElem

    def value(self, xs: Sequence[AlgElem]) -> AlgElem:
        A = self.r.parent
        out = A.one() if A.is_unital else None
        for x, p in zip(xs, self.x_power):
            for _ in range(p):
                out = x if out is None else out * x
        body = self.r * self.trailing
        return (body if out is None else out * body) * self.scalar


@dataclass
class Lemma11Rewrite:
    degree: tuple
    terms: list
    target: AlgElem
    reconstructed: AlgElem

    @property
    def verified(self) -> bool:
        return self.target == self.reconstructed

    @property
    def bounds_ok(self) -> bool:
        return all(all(k <= i for k, i in zip(t.k, self.degree)) for t in self.terms)


def lemma11_rewrite(
    e: AlgElem, xs: Sequence[AlgElem], degree: Sequence[int], R_space: Subspace | None = None
) -> Lemma11Rewrite:
    """Write ``e x^i`` as a sum of terms each ending in ``e [e, x]_k`` with k <= i.

    Expands ``e x^i`` with binomial coefficients, then replaces each
    ``[e, x]_{i-j}`` by its solved combination of ``e [e, x]_k``.
    """
    A = e.parent
    _check_idempotent(e)
    degree = tuple(int(d) for d in degree)
    if len(degree) != len(xs):
        raise ValueError("need one exponent per x")
    target = e
    for x, p in zip(xs, degree):
        for _ in range(p):
            target = target * x
    terms: list[FactoredTerm] = []
    if e.is_zero():
        return Lemma11Rewrite(degree, terms, target, A.zero())
    for j in itertools.product(*(range(d + 1) for d in degree)):
        scalar = prod(comb(n, i) for n, i in zip(degree, j))
        rest = tuple(n - i for n, i in zip(degree, j))
        sol = lemma10_solve(e, xs, rest, R_space)
        if not sol.solved:
            raise AlgebraError(f"commutator [e,x]_{rest} has no solution: {sol.finding}")
        for k, r in sol.coefficients.items():
            if r.is_zero():
                continue
            trailing = e * multi_commutator(e, list(xs), k)
            terms.append(FactoredTerm(scalar, j, r, k, trailing))
    recon = A.zero()
    for t in terms:
        recon = recon + t.value(xs)
    return Lemma11Rewrite(degree, terms, target, recon)
