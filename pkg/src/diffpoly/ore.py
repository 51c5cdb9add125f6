"""Iterated differential polynomial rings ``R*[X_1;d_1]...[X_n;d_n]``.

Elements are kept in right-coefficient normal form ``sum X_1^i1 ... X_n^in * a``
with ``a`` in the unital hull ``R*``. Variables are 0-based in the Python API
(``X1`` in text is index 0).

Two independent multiplication routes exist:

* :func:`ore_mul` uses memoized monomial products built from the commutation
  rules ``a X_j = X_j a - d_j(a)`` and ``X_l X_j = X_j X_l + d_l(X_j)`` (l > j).
* :func:`ore_normalize` literally rewrites formal words letter by letter with
  the same rules. It is slow and serves as the oracle for the first route.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .algebra import AlgebraError, AlgElem, Derivation, FiniteAlgebra, Subspace, UnitalHull, adjoin_unit
from .freealg import commutator_k

__all__ = [
    "TowerError",
    "InternalConsistencyError",
    "TowerLevel",
    "DerivationTower",
    "OrePoly",
    "Var",
    "Sum",
    "Prod",
    "ore_normalize",
    "ore_mul",
    "extend_derivation",
    "lemma12_rewrite",
    "Lemma12Result",
    "RMembership",
    "coefficients_over_R",
    "to_left_form",
    "from_left_form",
    "parse_orepoly",
    "graded_key",
    "multidegrees_upto",
]

Multidegree = tuple


class TowerError(ValueError):
    pass


class InternalConsistencyError(RuntimeError):
    pass


def graded_key(deg: Multidegree):
    return (sum(deg), tuple(deg))


def multidegrees_upto(bounds: Sequence[int]) -> list[Multidegree]:
    """All multidegrees componentwise <= bounds, graded-lex order."""
    out = [()]
    for b in bounds:
        out = [d + (i,) for d in out for i in range(b + 1)]
    return sorted(out, key=graded_key)


def _inc(deg, j, by=1):
    return deg[:j] + (deg[j] + by,) + deg[j + 1 :]


def _add(d1, d2):
    return tuple(a + b for a, b in zip(d1, d2))


def _acc(out: dict, deg, val: AlgElem):
    cur = out.get(deg)
    new = val if cur is None else cur + val
    if new.is_zero():
        out.pop(deg, None)
    else:
        out[deg] = new


@dataclass(frozen=True)
class TowerLevel:
    derivation: Derivation
    x_values: tuple = ()  # d_i(X_j) in R* for j < i


class DerivationTower:
    """Coefficient ring R with hull R*, and derivations d_0..d_{n-1}.

    Level ``i`` stores ``d_i`` on ``R*`` plus the values ``d_i(X_j)`` for ``j < i``.
    Those data determine ``d_i`` on ``R*[X_0..X_{i-1}]`` through Leibniz.
    Hypothesis checks (``d_i(R) ⊆ R``, compatibility) are reported by
    :meth:`compatibility_failures` and by the scenario audit, not enforced here.
    """

    def __init__(self, base: FiniteAlgebra, levels: Sequence[TowerLevel], hull: UnitalHull | None = None):
        self.base = base
        self.hull = hull if hull is not None else adjoin_unit(base)
        if self.hull.base != base:
            raise TowerError("hull was built from a different base algebra")
        self.levels = tuple(levels)
        for i, lvl in enumerate(self.levels):
            if lvl.derivation.parent != self.hull:
                raise TowerError(f"derivation at level {i} is not defined on R*")
            if len(lvl.x_values) != i:
                raise TowerError(f"level {i} needs {i} values d_{i}(X_j), got {len(lvl.x_values)}")
            for j, v in enumerate(lvl.x_values):
                if not isinstance(v, AlgElem) or v.parent != self.hull:
                    raise TowerError(f"d_{i}(X_{j}) must be an element of R*")
        self.n = len(self.levels)
        self._zero_deg = (0,) * self.n
        self._one = self.hull.one()
        self._cp: dict = {}
        self._mm: dict = {}
        self._vt: dict = {}
        self._dm: dict = {}

    @classmethod
    def build(
        cls,
        base: FiniteAlgebra,
        derivations: Sequence[Derivation | None],
        x_values: Mapping[tuple[int, int], AlgElem] | None = None,
        hull: UnitalHull | None = None,
    ) -> "DerivationTower":
        """Convenience constructor; ``None`` derivations and missing x-values mean zero."""
        hull = hull if hull is not None else adjoin_unit(base)
        x_values = dict(x_values or {})
        levels = []
        for i, d in enumerate(derivations):
            d = d if d is not None else Derivation.zero(hull)
            xs = tuple(x_values.pop((i, j), hull.zero()) for j in range(i))
            levels.append(TowerLevel(d, xs))
        if x_values:
            raise TowerError(f"x-values given for invalid (i, j) pairs: {sorted(x_values)}")
        return cls(base, levels, hull)

    # data access -------------------------------------------------------------

    def d(self, i: int, a: AlgElem) -> AlgElem:
        return self.levels[i].derivation(a)

    def x_value(self, i: int, j: int) -> AlgElem:
        """``d_i(X_j)`` for ``j < i``."""
        if not 0 <= j < i < self.n:
            raise TowerError(f"d_{i}(X_{j}) is only defined for 0 <= j < i < n")
        return self.levels[i].x_values[j]

    def coeff(self, a: AlgElem) -> AlgElem:
        """Lift base-algebra elements into R*; pass R* elements through."""
        if a.parent == self.hull:
            return a
        if a.parent == self.base:
            return self.hull.embed(a)
        raise TowerError("coefficient belongs to neither R nor R*")

    # constructors --------------------------------------------------------------

    def zero(self) -> "OrePoly":
        return OrePoly(self, {})

    def one(self) -> "OrePoly":
        return OrePoly(self, {self._zero_deg: self._one})

    def const(self, a: AlgElem) -> "OrePoly":
        return OrePoly(self, {self._zero_deg: self.coeff(a)})

    def var(self, j: int) -> "OrePoly":
        if not 0 <= j < self.n:
            raise TowerError(f"no variable with index {j} (n={self.n})")
        return OrePoly(self, {_inc(self._zero_deg, j): self._one})

    def monomial(self, deg: Multidegree, a: AlgElem | None = None) -> "OrePoly":
        return OrePoly(self, {tuple(deg): self._one if a is None else self.coeff(a)})

    def poly(self, terms: Mapping) -> "OrePoly":
        return OrePoly(self, {tuple(k): self.coeff(v) for k, v in terms.items()})

    # hypothesis data ---------------------------------------------------------------

    def compatibility_failures(self) -> list[str]:
        """Conditions under which the Leibniz extensions respect the ring relations.

        For j < i: ``(d_i d_j - d_j d_i)(a) = d_i(X_j) a - a d_i(X_j)`` on R*.
        For j < l < i: ``d_i(d_l(X_j)) = d_l(d_i(X_j)) - d_j(d_i(X_l))``.
        """
        out = []
        basis = self.hull.basis_elements()
        for i in range(self.n):
            for j in range(i):
                c = self.x_value(i, j)
                for a in basis:
                    lhs = self.d(i, self.d(j, a)) - self.d(j, self.d(i, a))
                    if lhs != c * a - a * c:
                        out.append(f"[d_{i + 1}, d_{j + 1}] != ad(d_{i + 1}(X_{j + 1})) on {a}")
                        break
                for l in range(j + 1, i):
                    lhs = self.d(i, self.x_value(l, j))
                    rhs = self.d(l, self.x_value(i, j)) - self.d(j, self.x_value(i, l))
                    if lhs != rhs:
                        out.append(f"d_{i + 1} incompatible with X_{l + 1} X_{j + 1} relation")
        return out

    # multiplication kernels ------------------------------------------------------------

    def _coeff_pass(self, a: AlgElem, beta: Multidegree) -> dict:
        """``a * X^beta`` in normal form; every output degree is <= beta."""
        key = (a.coords, beta)
        hit = self._cp.get(key)
        if hit is not None:
            return hit
        if a.is_zero():
            out: dict = {}
        elif not any(beta):
            out = {beta: a}
        else:
            j = next(t for t, e in enumerate(beta) if e)
            beta1 = _inc(beta, j, -1)
            out = {}
            for deg, c in self._coeff_pass(a, beta1).items():
                _acc(out, _inc(deg, j), c)
            da = self.d(j, a)
            if not da.is_zero():
                for deg, c in self._coeff_pass(da, beta1).items():
                    _acc(out, deg, -c)
        self._cp[key] = out
        return out

    def _var_times(self, l: int, beta: Multidegree) -> dict:
        """``X_l * X^beta``."""
        key = (l, beta)
        hit = self._vt.get(key)
        if hit is not None:
            return hit
        out = {_inc(beta, l): self._one}
        lower = beta[:l] + (0,) * (self.n - l)
        if any(lower):
            upper = (0,) * l + beta[l:]
            for gamma, c in self._d_mono(l, lower).items():
                for eps, f in self._coeff_pass(c, upper).items():
                    _acc(out, _add(gamma, eps), f)
        self._vt[key] = out
        return out

    def _mono_mul(self, alpha: Multidegree, beta: Multidegree) -> dict:
        """``X^alpha * X^beta``."""
        key = (alpha, beta)
        hit = self._mm.get(key)
        if hit is not None:
            return hit
        if not any(alpha):
            out = {beta: self._one}
        else:
            l = max(t for t, e in enumerate(alpha) if e)
            alpha1 = _inc(alpha, l, -1)
            out = {}
            for gamma, c in self._var_times(l, beta).items():
                for delta, f in self._mono_mul(alpha1, gamma).items():
                    _acc(out, delta, f * c)
        self._mm[key] = out
        return out

    def _d_mono(self, i: int, alpha: Multidegree) -> dict:
        """``d_i(X^alpha)`` for alpha supported on variables < i."""
        key = (i, alpha)
        hit = self._dm.get(key)
        if hit is not None:
            return hit
        if any(alpha[i:]):
            raise TowerError(f"d_{i + 1} is only defined on X_1..X_{i}")
        out: dict = {}
        if any(alpha):
            l = max(t for t, e in enumerate(alpha) if e)
            alpha1 = _inc(alpha, l, -1)
            e_l = _inc(self._zero_deg, l)
            # d(X^a1 X_l) = d(X^a1) X_l + X^a1 d(X_l)
            for gamma, c in self._d_mono(i, alpha1).items():
                for eps, f in self._coeff_pass(c, e_l).items():
                    for delta, g in self._mono_mul(gamma, eps).items():
                        _acc(out, delta, g * f)
            c_il = self.x_value(i, l)
            if not c_il.is_zero():
                _acc(out, alpha1, c_il)
        self._dm[key] = out
        return out

    def _poly_mul(self, p: Mapping, q: Mapping) -> dict:
        out: dict = {}
        for alpha, a in p.items():
            for beta, b in q.items():
                for gamma, c in self._coeff_pass(a, beta).items():
                    cb = c * b
                    if cb.is_zero():
                        continue
                    for delta, f in self._mono_mul(alpha, gamma).items():
                        _acc(out, delta, f * cb)
        return out

    def _apply_d(self, i: int, p: Mapping) -> dict:
        out: dict = {}
        for alpha, a in p.items():
            for gamma, c in self._d_mono(i, alpha).items():
                _acc(out, gamma, c * a)
            da = self.d(i, a)
            if not da.is_zero():
                _acc(out, alpha, da)
        return out

    def __repr__(self) -> str:
        return f"DerivationTower(n={self.n}, base={self.base!r})"


class OrePoly:
    """Element of ``R*[X_1;d_1]...[X_n;d_n]`` in right-coefficient normal form."""

    __slots__ = ("tower", "_terms")

    def __init__(self, tower: DerivationTower, terms: Mapping[Multidegree, AlgElem]):
        clean = {}
        for deg, a in terms.items():
            deg = tuple(int(e) for e in deg)
            if len(deg) != tower.n or any(e < 0 for e in deg):
                raise TowerError(f"multidegree {deg} does not fit a tower with n={tower.n}")
            if a.parent != tower.hull:
                raise TowerError("coefficients must lie in R*")
            if not a.is_zero():
                clean[deg] = a
        self.tower = tower
        self._terms = dict(sorted(clean.items(), key=lambda kv: graded_key(kv[0])))

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, deg: Multidegree) -> AlgElem:
        return self._terms.get(tuple(deg), self.tower.hull.zero())

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) <= 1

    def degree(self) -> int:
        return max((sum(d) for d in self._terms), default=-1)

    def _same(self, other: "OrePoly"):
        if other.tower is not self.tower:
            raise TowerError("operands belong to different towers")

    def _lift(self, other):
        if isinstance(other, OrePoly):
            self._same(other)
            return other
        if isinstance(other, AlgElem):
            return self.tower.const(other)
        if isinstance(other, int):
            return self.tower.one() * other if other else self.tower.zero()
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for deg, a in other._terms.items():
            _acc(out, deg, a)
        return OrePoly(self.tower, out)

    __radd__ = __add__

    def __neg__(self):
        return OrePoly(self.tower, {d: -a for d, a in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return OrePoly(self.tower, {d: a * other for d, a in self._terms.items()})
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return OrePoly(self.tower, self.tower._poly_mul(self._terms, other._terms))

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        if isinstance(other, AlgElem):
            return self.tower.const(other) * self
        return NotImplemented

    def __pow__(self, k: int):
        out = self.tower.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, OrePoly):
            return self.tower is other.tower and self._terms == other._terms
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        return NotImplemented

    def __hash__(self):
        return hash(tuple((d, a.coords) for d, a in self._terms.items()))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"{_mono_text(d)} * [{','.join(map(str, a.coords))}]" for d, a in self._terms.items())

    def __repr__(self) -> str:
        return f"OrePoly({str(self)!r})"


def _mono_text(deg) -> str:
    parts = [f"X{j + 1}^{e}" for j, e in enumerate(deg) if e]
    return ".".join(parts) if parts else "1"


_TERM_RE = re.compile(r"\s*(.+?)\s*\*\s*\[([^\]]*)\]\s*")


def parse_orepoly(text: str, tower: DerivationTower) -> OrePoly:
    """Inverse of ``str(OrePoly)``."""
    text = text.strip()
    if text == "0":
        return tower.zero()
    out: dict = {}
    for chunk in text.split(" + "):
        m = _TERM_RE.fullmatch(chunk)
        if not m:
            raise ValueError(f"bad OrePoly term: {chunk!r}")
        mono, coords = m.group(1), m.group(2)
        deg = [0] * tower.n
        if mono != "1":
            for f in mono.split("."):
                vm = re.fullmatch(r"X(\d+)\^(\d+)", f)
                if not vm:
                    raise ValueError(f"bad variable power: {f!r}")
                j = int(vm.group(1)) - 1
                if not 0 <= j < tower.n:
                    raise ValueError(f"unknown variable X{j + 1}")
                deg[j] += int(vm.group(2))
        a = tower.hull.element([int(c) for c in coords.split(",")])
        _acc(out, tuple(deg), a)
    return OrePoly(tower, out)


def ore_mul(p: OrePoly, q: OrePoly) -> OrePoly:
    if p.tower is not q.tower:
        raise TowerError("operands belong to different towers")
    return p * q


# formal expressions and the rewriting normalizer ------------------------------------


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Sum:
    terms: tuple

    def __init__(self, *terms):
        object.__setattr__(self, "terms", tuple(terms))


@dataclass(frozen=True)
class Prod:
    factors: tuple

    def __init__(self, *factors):
        object.__setattr__(self, "factors", tuple(factors))


def _expand(expr, tower: DerivationTower) -> list[tuple[int, tuple]]:
    if isinstance(expr, Var):
        if not 0 <= expr.index < tower.n:
            raise ValueError(f"unknown generator X{expr.index + 1} (tower has n={tower.n})")
        return [(1, (expr.index,))]
    if isinstance(expr, AlgElem):
        try:
            a = tower.coeff(expr)
        except TowerError as exc:
            raise ValueError(str(exc)) from None
        return [(1, (a,))]
    if isinstance(expr, bool):
        raise ValueError("bool is not a valid expression")
    if isinstance(expr, int):
        return [(expr, ())]
    if isinstance(expr, OrePoly):
        if expr.tower is not tower:
            raise ValueError("OrePoly from another tower")
        out = []
        for deg, a in expr.items():
            word = tuple(j for j, e in enumerate(deg) for _ in range(e)) + (a,)
            out.append((1, word))
        return out
    if isinstance(expr, Sum):
        return [t for sub in expr.terms for t in _expand(sub, tower)]
    if isinstance(expr, Prod):
        acc = [(1, ())]
        for f in expr.factors:
            fe = _expand(f, tower)
            acc = [(s1 * s2, w1 + w2) for s1, w1 in acc for s2, w2 in fe]
        return acc
    raise ValueError(f"unknown generator or expression node: {expr!r}")


def _first_bad(word) -> int:
    for t in range(len(word) - 1):
        x, y = word[t], word[t + 1]
        if isinstance(x, AlgElem):
            return t
        if isinstance(y, int) and x > y:
            return t
    return -1


def ore_normalize(expr, tower: DerivationTower) -> OrePoly:
    """Normal form of a formal sum/product of variables and coefficients.

    Words are rewritten leftmost-first with ``a b -> (ab)``,
    ``a X_j -> X_j a - d_j(a)`` and ``X_l X_j -> X_j X_l + d_l(X_j)`` for l > j.
    Each step lowers (length, inversions) lexicographically, so it terminates.
    """
    p = tower.hull.modulus
    work: dict = {}
    for s, w in _expand(expr, tower):
        work[w] = (work.get(w, 0) + s) % p
    result: dict = {}

    def push(w, s):
        if any(isinstance(x, AlgElem) and x.is_zero() for x in w):
            return
        work[w] = (work.get(w, 0) + s) % p

    while work:
        w, s = work.popitem()
        if s == 0:
            continue
        t = _first_bad(w)
        if t < 0:
            deg = [0] * tower.n
            coef = tower.hull.one()
            for x in w:
                if isinstance(x, AlgElem):
                    coef = x
                else:
                    deg[x] += 1
            _acc(result, tuple(deg), coef * s)
            continue
        x, y = w[t], w[t + 1]
        head, tail = w[:t], w[t + 2 :]
        if isinstance(x, AlgElem) and isinstance(y, AlgElem):
            push(head + (x * y,) + tail, s)
        elif isinstance(x, AlgElem):
            push(head + (y, x) + tail, s)
            push(head + (tower.d(y, x),) + tail, -s)
        else:
            push(head + (y, x) + tail, s)
            push(head + (tower.x_value(x, y),) + tail, s)
    return OrePoly(tower, result)


# derivations on the extension --------------------------------------------------------


def extend_derivation(tower: DerivationTower, i: int) -> Callable[[OrePoly], OrePoly]:
    """``d_i`` on ``R*[X_0..X_{i-1}]``, determined by ``d_i|R*`` and ``d_i(X_j)``."""
    if not 0 <= i < tower.n:
        raise TowerError(f"no level {i} in a tower with n={tower.n}")

    def d_i(p: OrePoly) -> OrePoly:
        if p.tower is not tower:
            raise TowerError("element from another tower")
        for deg in p.terms:
            if any(deg[i:]):
                raise TowerError(f"d_{i + 1} is only defined on polynomials in X_1..X_{i}")
        return OrePoly(tower, tower._apply_d(i, p.terms))

    return d_i


# conventions ---------------------------------------------------------------------------


def from_left_form(tower: DerivationTower, terms: Mapping[Multidegree, AlgElem]) -> OrePoly:
    """``sum a * X^alpha`` (coefficients on the left) as a normal-form element."""
    out: dict = {}
    for deg, a in terms.items():
        for g, c in tower._coeff_pass(tower.coeff(a), tuple(deg)).items():
            _acc(out, g, c)
    return OrePoly(tower, out)


def to_left_form(p: OrePoly) -> dict:
    """Coefficients ``a_alpha`` with ``p = sum a_alpha X^alpha``.

    Peels off the graded-largest term: ``a X^alpha`` equals ``X^alpha a`` plus
    strictly lower-degree terms, so this terminates.
    """
    tower = p.tower
    rest = dict(p.terms)
    left: dict = {}
    while rest:
        deg = max(rest, key=graded_key)
        a = rest[deg]
        _acc(left, deg, a)
        for g, c in tower._coeff_pass(a, deg).items():
            _acc(rest, g, -c)
    return dict(sorted(left.items(), key=lambda kv: graded_key(kv[0])))


# membership -----------------------------------------------------------------------------


@dataclass(frozen=True)
class RMembership:
    verdicts: dict  # multidegree -> "in-R" | "in-R*-only"

    @property
    def lies_over_R(self) -> bool:
        return all(v == "in-R" for v in self.verdicts.values())


def coefficients_over_R(p: OrePoly) -> RMembership:
    hull = p.tower.hull
    return RMembership({d: ("in-R" if hull.in_base(a) else "in-R*-only") for d, a in p.items()})


# commutators with a variable -------------------------------------------------------------------


@dataclass
class Lemma12Result:
    degree: Multidegree
    j: int
    k: int
    coefficients: dict  # multidegree -> AlgElem in R*
    in_N: dict = field(default_factory=dict)  # multidegree -> bool (empty when no N given)

    @property
    def all_in_N(self) -> bool:
        return all(self.in_N.values())


def lemma12_rewrite(term: OrePoly, j: int, k: int, N: Subspace | None = None) -> Lemma12Result:
    """Normal form of ``[X^alpha a, X_j]_k`` with each coefficient tested against N.

    Every output multidegree must be componentwise <= alpha; a violation
    means the rewriting machinery is broken and raises InternalConsistencyError.
    """
    tower = term.tower
    if not term.is_monomial():
        raise ValueError("lemma12_rewrite expects a single term X^alpha * a")
    if term.is_zero():
        alpha = (0,) * tower.n
    else:
        (alpha,) = term.terms
    xj = tower.var(j)
    res = commutator_k(term, xj, k)
    coeffs = res.terms
    for deg in coeffs:
        if any(a > b for a, b in zip(deg, alpha)):
            raise InternalConsistencyError(f"rewrite produced degree {deg} above {alpha}")
    in_N = {d: N.contains(c) for d, c in coeffs.items()} if N is not None else {}
    return Lemma12Result(alpha, j, k, coeffs, in_N)
