"""Finite-dimensional associative algebras over Z/m given by structure constants.

These are the concrete rings everything else is evaluated in: strictly upper
triangular matrices as the standard nilpotent coefficient ring, full matrix
algebras as evaluation targets, and unital hulls ``R*`` obtained by adjoining
an identity. Linear algebra (spans, closures, kernels) requires a prime modulus.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._linalg import PrimeField, is_prime, nullspace, reduce_vector, rref

__all__ = [
    "AlgebraError",
    "UnsupportedModulusError",
    "SearchTooLargeError",
    "FiniteAlgebra",
    "UnitalHull",
    "AlgElem",
    "Derivation",
    "Subspace",
    "make_matrix_algebra",
    "make_strict_upper",
    "adjoin_unit",
    "strip_unit",
    "check_leibniz",
    "leibniz_witness",
    "inner_derivation",
    "subalgebra_closure",
    "power_spans",
    "is_nilpotent",
    "find_idempotents",
    "DEFAULT_SEARCH_LIMIT",
]

DEFAULT_SEARCH_LIMIT = 2**20


class AlgebraError(ValueError):
    pass


class UnsupportedModulusError(AlgebraError):
    pass


class SearchTooLargeError(AlgebraError):
    def __init__(self, size: int, limit: int):
        super().__init__(f"search space has {size} candidates, limit is {limit}")
        self.size = size
        self.limit = limit


class FiniteAlgebra:
    """Associative algebra with basis ``basis_labels`` over Z/modulus.

    ``products[(i, j)]`` is the coordinate vector of ``b_i * b_j``; missing
    pairs are zero. Associativity is checked on every basis triple unless
    ``check=False``.
    """

    def __init__(
        self,
        modulus: int,
        basis_labels: Sequence[str],
        products: Mapping[tuple[int, int], Sequence[int]],
        unit: Sequence[int] | None = None,
        check: bool = True,
        name: str | None = None,
    ):
        if modulus < 2:
            raise AlgebraError("modulus must be >= 2")
        self.modulus = int(modulus)
        self.labels = tuple(basis_labels)
        self.dim = len(self.labels)
        self.name = name
        d = self.dim
        table = [[() for _ in range(d)] for _ in range(d)]
        for (i, j), vec in products.items():
            if not (0 <= i < d and 0 <= j < d):
                raise AlgebraError(f"product index ({i},{j}) out of range")
            if len(vec) != d:
                raise AlgebraError(f"product ({i},{j}) has {len(vec)} coords, expected {d}")
            table[i][j] = tuple((k, int(c) % self.modulus) for k, c in enumerate(vec) if int(c) % self.modulus)
        self._table = tuple(tuple(row) for row in table)
        self._key = (self.modulus, self.labels, self._table)
        self.unit = None
        if unit is not None:
            u = self.element(unit)
            self.unit = u
        if check:
            bad = self.associativity_witness()
            if bad is not None:
                i, j, k = bad
                raise AlgebraError(
                    "associativity fails on basis triple "
                    f"({self.labels[i]}, {self.labels[j]}, {self.labels[k]})"
                )
            if self.unit is not None:
                for i in range(d):
                    b = self.basis(i)
                    if self.unit * b != b or b * self.unit != b:
                        raise AlgebraError(f"designated unit is not an identity on {self.labels[i]}")

    # construction helpers -------------------------------------------------

    def element(self, coords: Sequence[int]) -> "AlgElem":
        if len(coords) != self.dim:
            raise AlgebraError(f"expected {self.dim} coordinates, got {len(coords)}")
        return AlgElem(self, tuple(int(c) % self.modulus for c in coords))

    def basis(self, i: int | str) -> "AlgElem":
        if isinstance(i, str):
            i = self.labels.index(i)
        v = [0] * self.dim
        v[i] = 1
        return AlgElem(self, tuple(v))

    def basis_elements(self) -> list["AlgElem"]:
        return [self.basis(i) for i in range(self.dim)]

    def zero(self) -> "AlgElem":
        return AlgElem(self, (0,) * self.dim)

    def one(self) -> "AlgElem":
        if self.unit is None:
            raise AlgebraError("algebra is not unital")
        return self.unit

    @property
    def is_unital(self) -> bool:
        return self.unit is not None

    @property
    def field(self) -> PrimeField:
        if not is_prime(self.modulus):
            raise UnsupportedModulusError(f"linear algebra needs a prime modulus, got {self.modulus}")
        return PrimeField(self.modulus)

    # arithmetic ------------------------------------------------------------

    def _mul(self, u: tuple, v: tuple) -> tuple:
        m = self.modulus
        out = [0] * self.dim
        table = self._table
        for i, ui in enumerate(u):
            if not ui:
                continue
            row = table[i]
            for j, vj in enumerate(v):
                if not vj:
                    continue
                s = ui * vj
                for k, c in row[j]:
                    out[k] += s * c
        return tuple(x % m for x in out)

    def product_coords(self, i: int, j: int) -> list[int]:
        out = [0] * self.dim
        for k, c in self._table[i][j]:
            out[k] = c
        return out

    def associativity_witness(self) -> tuple[int, int, int] | None:
        d = self.dim
        b = [self.basis(i).coords for i in range(d)]
        for i, j, k in itertools.product(range(d), repeat=3):
            if self._mul(self._mul(b[i], b[j]), b[k]) != self._mul(b[i], self._mul(b[j], b[k])):
                return (i, j, k)
        return None

    def left_matrix(self, u: "AlgElem") -> list[list[int]]:
        """Matrix of ``v -> u v``; column j is ``u * b_j``."""
        cols = [(u * self.basis(j)).coords for j in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def structure_constants(self) -> np.ndarray:
        t = np.zeros((self.dim, self.dim, self.dim), dtype=np.int64)
        for i in range(self.dim):
            for j in range(self.dim):
                for k, c in self._table[i][j]:
                    t[i, j, k] = c
        return t

    def products_dict(self) -> dict[tuple[int, int], list[int]]:
        return {
            (i, j): self.product_coords(i, j)
            for i in range(self.dim)
            for j in range(self.dim)
            if self._table[i][j]
        }

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        return self._key == other._key and (
            (self.unit is None and other.unit is None)
            or (self.unit is not None and other.unit is not None and self.unit.coords == other.unit.coords)
        )

    def __hash__(self):
        return hash(self._key)

    def __repr__(self) -> str:
        tag = self.name or f"dim={self.dim}"
        return f"FiniteAlgebra({tag}, mod {self.modulus}{', unital' if self.is_unital else ''})"


class UnitalHull(FiniteAlgebra):
    """``R*``: the base algebra R as an ideal plus an adjoined identity.

    The first ``base.dim`` coordinates are R; the last coordinate is the unit.
    """

    def __init__(self, base: FiniteAlgebra):
        d = base.dim
        labels = list(base.labels) + ["1"]
        products = {}
        for (i, j), vec in base.products_dict().items():
            products[(i, j)] = list(vec) + [0]
        for i in range(d + 1):
            e = [0] * (d + 1)
            e[i] = 1
            products[(d, i)] = e
            products[(i, d)] = e
        unit = [0] * d + [1]
        name = f"{base.name}*" if base.name else None
        super().__init__(base.modulus, labels, products, unit=unit, check=False, name=name)
        self.base = base

    def embed(self, u: "AlgElem") -> "AlgElem":
        if u.parent != self.base:
            raise AlgebraError("element does not belong to the base algebra")
        return AlgElem(self, u.coords + (0,))

    def in_base(self, u: "AlgElem") -> bool:
        return u.coords[-1] == 0

    def project(self, u: "AlgElem") -> "AlgElem":
        if not self.in_base(u):
            raise AlgebraError("element has a unit component")
        return AlgElem(self.base, u.coords[:-1])

    def base_subspace(self) -> "Subspace":
        return Subspace.span(self, [self.basis(i) for i in range(self.base.dim)])


class AlgElem:
    __slots__ = ("parent", "coords")

    def __init__(self, parent: FiniteAlgebra, coords: tuple):
        self.parent = parent
        self.coords = coords

    def _check(self, other: "AlgElem"):
        if not isinstance(other, AlgElem):
            raise TypeError(f"cannot combine AlgElem with {type(other).__name__}")
        if other.parent is not self.parent and other.parent != self.parent:
            raise AlgebraError("elements live in different algebras")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        m = self.parent.modulus
        return AlgElem(self.parent, tuple((a + b) % m for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        m = self.parent.modulus
        return AlgElem(self.parent, tuple((-a) % m for a in self.coords))

    def __sub__(self, other):
        self._check(other)
        m = self.parent.modulus
        return AlgElem(self.parent, tuple((a - b) % m for a, b in zip(self.coords, other.coords)))

    def __mul__(self, other):
        if isinstance(other, int):
            m = self.parent.modulus
            return AlgElem(self.parent, tuple((a * other) % m for a in self.coords))
        if not isinstance(other, AlgElem):
            return NotImplemented
        self._check(other)
        return AlgElem(self.parent, self.parent._mul(self.coords, other.coords))

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        if n < 1:
            if n == 0:
                return self.parent.one()
            raise ValueError("negative power")
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if not isinstance(other, AlgElem):
            return NotImplemented
        return self.coords == other.coords and (other.parent is self.parent or other.parent == self.parent)

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self) -> str:
        return f"AlgElem({self})"

    def __str__(self) -> str:
        parts = []
        for c, lab in zip(self.coords, self.parent.labels):
            if c:
                parts.append(lab if c == 1 else f"{c}*{lab}")
        return " + ".join(parts) if parts else "0"


class Derivation:
    """Linear map on an algebra; row ``j`` of ``matrix`` is the image of basis ``j``.

    Leibniz is verified on all basis pairs unless ``check=False`` (used for
    deliberately broken audit fixtures).
    """

    def __init__(self, parent: FiniteAlgebra, matrix: Sequence[Sequence[int]], check: bool = True):
        m = parent.modulus
        if len(matrix) != parent.dim or any(len(r) != parent.dim for r in matrix):
            raise AlgebraError(f"derivation matrix must be {parent.dim}x{parent.dim}")
        self.parent = parent
        self.matrix = tuple(tuple(int(x) % m for x in row) for row in matrix)
        if check:
            w = leibniz_witness(self, parent)
            if w is not None:
                i, j = w
                raise AlgebraError(
                    f"Leibniz rule fails on basis pair ({parent.labels[i]}, {parent.labels[j]})"
                )

    @classmethod
    def zero(cls, parent: FiniteAlgebra) -> "Derivation":
        return cls(parent, [[0] * parent.dim for _ in range(parent.dim)], check=False)

    def __call__(self, u: AlgElem) -> AlgElem:
        if u.parent is not self.parent and u.parent != self.parent:
            raise AlgebraError("element does not belong to the derivation's algebra")
        m = self.parent.modulus
        out = [0] * self.parent.dim
        for j, c in enumerate(u.coords):
            if c:
                for k, x in enumerate(self.matrix[j]):
                    out[k] += c * x
        return AlgElem(self.parent, tuple(x % m for x in out))

    apply = __call__

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.matrix)

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.parent == other.parent and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self) -> str:
        return f"Derivation(dim={self.parent.dim})"


def _as_map(d, A: FiniteAlgebra):
    if isinstance(d, Derivation):
        return d
    if callable(d):
        return d
    return Derivation(A, d, check=False)


def leibniz_witness(d, A: FiniteAlgebra) -> tuple[int, int] | None:
    """First basis pair (i, j) where ``d(b_i b_j) != d(b_i) b_j + b_i d(b_j)``."""
    f = _as_map(d, A)
    b = A.basis_elements()
    images = [f(x) for x in b]
    for i in range(A.dim):
        for j in range(A.dim):
            if f(b[i] * b[j]) != images[i] * b[j] + b[i] * images[j]:
                return (i, j)
    return None


def check_leibniz(d, A: FiniteAlgebra) -> bool:
    """True iff the linear map ``d`` (Derivation, matrix rows, or callable) is a derivation of A."""
    if isinstance(d, Derivation) and d.parent != A:
        raise AlgebraError("derivation belongs to a different algebra")
    if not isinstance(d, Derivation) and not callable(d):
        if len(d) != A.dim or any(len(r) != A.dim for r in d):
            raise AlgebraError(f"matrix must be {A.dim}x{A.dim}")
    return leibniz_witness(d, A) is None


def inner_derivation(u: AlgElem) -> Derivation:
    """``a -> u a - a u``."""
    A = u.parent
    rows = [(u * b - b * u).coords for b in A.basis_elements()]
    return Derivation(A, rows, check=False)


# constructors -------------------------------------------------------------


def _require_prime(p: int):
    if not is_prime(p):
        raise AlgebraError(f"{p} is not prime")


def make_matrix_algebra(n: int, p: int) -> FiniteAlgebra:
    """Full matrix algebra M_n(Z/p) on the E_ij basis, row-major order."""
    if n < 1:
        raise AlgebraError("n must be >= 1")
    _require_prime(p)
    idx = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    pos = {ij: k for k, ij in enumerate(idx)}
    products = {}
    for (a, (i, j)) in enumerate(idx):
        for (b, (k, l)) in enumerate(idx):
            if j == k:
                v = [0] * len(idx)
                v[pos[(i, l)]] = 1
                products[(a, b)] = v
    unit = [1 if i == j else 0 for (i, j) in idx]
    return FiniteAlgebra(p, [f"E{i}{j}" for i, j in idx], products, unit=unit, check=False, name=f"M{n}(Z/{p})")


def make_strict_upper(n: int, p: int) -> FiniteAlgebra:
    """Strictly upper triangular N_n(Z/p); basis E_ij, i<j, lexicographic."""
    if n < 2:
        raise AlgebraError("n must be >= 2")
    _require_prime(p)
    idx = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    pos = {ij: k for k, ij in enumerate(idx)}
    products = {}
    for (a, (i, j)) in enumerate(idx):
        for (b, (k, l)) in enumerate(idx):
            if j == k:
                v = [0] * len(idx)
                v[pos[(i, l)]] = 1
                products[(a, b)] = v
    return FiniteAlgebra(p, [f"E{i}{j}" for i, j in idx], products, check=False, name=f"N{n}(Z/{p})")


def adjoin_unit(A: FiniteAlgebra) -> UnitalHull:
    if A.is_unital:
        raise AlgebraError("algebra already has a unit")
    return UnitalHull(A)


def strip_unit(A: FiniteAlgebra) -> FiniteAlgebra:
    """Same multiplication, unit forgotten (treat a unital algebra as a bare ring)."""
    return FiniteAlgebra(A.modulus, A.labels, A.products_dict(), check=False, name=A.name)


# subspaces ----------------------------------------------------------------


class Subspace:
    """Linear subspace of an algebra over a prime field, stored in rref."""

    def __init__(self, parent: FiniteAlgebra, rows: Iterable[Sequence[int]]):
        self.parent = parent
        self._field = parent.field
        red, piv = rref([list(r) for r in rows], self._field)
        self._rows = [tuple(r) for r in red]
        self._pivots = piv

    @classmethod
    def span(cls, parent: FiniteAlgebra, elems: Iterable[AlgElem]) -> "Subspace":
        rows = []
        for e in elems:
            if e.parent != parent:
                raise AlgebraError("element from a different algebra")
            rows.append(e.coords)
        return cls(parent, rows)

    @classmethod
    def full(cls, parent: FiniteAlgebra) -> "Subspace":
        return cls.span(parent, parent.basis_elements())

    @classmethod
    def zero(cls, parent: FiniteAlgebra) -> "Subspace":
        return cls(parent, [])

    @property
    def dim(self) -> int:
        return len(self._rows)

    @property
    def rows(self) -> list[tuple]:
        return list(self._rows)

    def basis(self) -> list[AlgElem]:
        return [AlgElem(self.parent, r) for r in self._rows]

    def contains(self, x: AlgElem | Sequence[int]) -> bool:
        coords = x.coords if isinstance(x, AlgElem) else tuple(x)
        r = reduce_vector(coords, [list(r) for r in self._rows], self._pivots, self._field)
        return not any(r)

    __contains__ = contains

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(r) for r in self._rows)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.parent, self._rows + other._rows)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.parent == other.parent and self._rows == other._rows

    def __hash__(self):
        return hash(tuple(self._rows))

    def size(self) -> int:
        return self.parent.modulus ** self.dim

    def elements(self) -> Iterable[AlgElem]:
        p = self.parent.modulus
        for lam in itertools.product(range(p), repeat=self.dim):
            v = [0] * self.parent.dim
            for c, row in zip(lam, self._rows):
                if c:
                    for k, x in enumerate(row):
                        v[k] += c * x
            yield AlgElem(self.parent, tuple(x % p for x in v))

    def is_closed(self) -> bool:
        b = self.basis()
        return all(self.contains(x * y) for x in b for y in b)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim} in {self.parent!r})"


def _as_subspace(space) -> Subspace:
    if isinstance(space, Subspace):
        return space
    if isinstance(space, FiniteAlgebra):
        return Subspace.full(space)
    raise TypeError(f"expected FiniteAlgebra or Subspace, got {type(space).__name__}")


def kernel_of_left_action(elems: Sequence[AlgElem], V: FiniteAlgebra) -> Subspace:
    """``{v in V : u v = 0 for every u in elems}`` under the regular action."""
    rows = []
    for u in elems:
        rows.extend(V.left_matrix(u))
    basis = nullspace(rows, V.dim, V.field) if rows else [[1 if i == j else 0 for i in range(V.dim)] for j in range(V.dim)]
    return Subspace(V, basis)


def subalgebra_closure(gens: Iterable[AlgElem], parent: FiniteAlgebra | None = None) -> Subspace:
    """Smallest multiplicatively closed subspace containing ``gens`` (no unit added)."""
    gens = list(gens)
    if parent is None:
        if not gens:
            raise AlgebraError("empty generator set needs an explicit parent algebra")
        parent = gens[0].parent
    S = Subspace.span(parent, gens)
    while True:
        b = S.basis()
        new = [x * y for x in b for y in b]
        T = Subspace(parent, S.rows + [z.coords for z in new])
        if T.dim == S.dim:
            return S
        S = T


def power_spans(S: Subspace, max_steps: int | None = None) -> list[Subspace]:
    """``[S^1, S^2, ...]`` until a power vanishes or stabilizes nonzero.

    ``S^k`` is the span of all k-fold products. S must be closed under
    multiplication, so the chain is decreasing.
    """
    powers = [S]
    limit = max_steps if max_steps is not None else S.dim + 2
    base = S.basis()
    while powers[-1].dim > 0 and len(powers) <= limit:
        prev = powers[-1]
        nxt = Subspace.span(S.parent, [s * t for s in base for t in prev.basis()])
        if nxt.dim == prev.dim:
            powers.append(nxt)
            break
        powers.append(nxt)
    return powers


def is_nilpotent(S: Subspace | FiniteAlgebra) -> int | None:
    """Least m with S^m = 0, or None if the powers stabilize at a nonzero space."""
    S = _as_subspace(S)
    if not S.is_closed():
        raise AlgebraError("subspace is not closed under multiplication")
    if S.dim == 0:
        return 1
    powers = power_spans(S)
    if powers[-1].dim == 0:
        return len(powers)
    return None


def find_idempotents(space, limit: int = DEFAULT_SEARCH_LIMIT, chunk: int = 1 << 15) -> list[AlgElem]:
    """All e with e*e == e in ``space`` (an algebra or subspace), by exhaustive search.

    Result is sorted by coordinate tuple and always contains 0.
    """
    S = _as_subspace(space)
    A = S.parent
    p = A.modulus
    q = S.dim
    size = p**q
    if size > limit:
        raise SearchTooLargeError(size, limit)
    if q == 0:
        return [A.zero()]
    B = np.array(S.rows, dtype=np.int64)
    T = A.structure_constants()
    powers = p ** np.arange(q, dtype=np.int64)
    found = []
    for start in range(0, size, chunk):
        idx = np.arange(start, min(start + chunk, size), dtype=np.int64)
        lam = (idx[:, None] // powers[None, :]) % p
        X = (lam @ B) % p
        sq = np.einsum("ni,nj,ijk->nk", X, X, T) % p
        hit = np.all(sq == X, axis=1)
        found.extend(tuple(int(c) for c in row) for row in X[hit])
    return [AlgElem(A, c) for c in sorted(set(found))]
