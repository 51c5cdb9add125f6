"""Exact Gaussian elimination over a prime field or the rationals.

Vectors are plain lists; a "field" object supplies normalization and inversion.
Everything here is small and dense, which is all the desk-scale checks need.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class PrimeField:
    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        self.p = p

    def norm(self, x):
        return int(x) % self.p

    def inv(self, x):
        return pow(int(x), -1, self.p)

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"


class RationalField:
    def norm(self, x):
        return Fraction(x)

    def inv(self, x):
        return 1 / Fraction(x)

    def __repr__(self) -> str:
        return "RationalField()"


QQ = RationalField()


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def rref(rows: Sequence[Sequence], field) -> tuple[list[list], list[int]]:
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    m = [[field.norm(x) for x in row] for row in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = field.inv(m[r][c])
        m[r] = [field.norm(x * inv) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [field.norm(a - f * b) for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows, field) -> int:
    return len(rref(rows, field)[1])


def reduce_vector(v: Sequence, basis: list[list], pivots: list[int], field) -> list:
    """Remainder of v modulo the row space of an rref basis."""
    out = [field.norm(x) for x in v]
    for row, c in zip(basis, pivots):
        f = out[c]
        if f != 0:
            out = [field.norm(a - f * b) for a, b in zip(out, row)]
    return out


def solve(columns: Sequence[Sequence], target: Sequence, field) -> list | None:
    """Find x with sum_i x_i * columns[i] == target.

    Free variables are set to zero, so the answer is a deterministic canonical
    representative. Returns None when the system is inconsistent.
    """
    n = len(columns)
    dim = len(target)
    if n == 0:
        return [] if all(field.norm(t) == 0 for t in target) else None
    aug = [[columns[j][i] for j in range(n)] + [target[i]] for i in range(dim)]
    red, pivots = rref(aug, field)
    if n in pivots:
        return None
    x = [field.norm(0)] * n
    for row, c in zip(red, pivots):
        x[c] = row[n]
    return x


def nullspace(rows: Sequence[Sequence], ncols: int, field) -> list[list]:
    """Basis of {x : rows @ x == 0}."""
    red, pivots = rref(rows, field) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [field.norm(0)] * ncols
        x[f] = field.norm(1)
        for row, c in zip(red, pivots):
            x[c] = field.norm(-row[f])
        basis.append(x)
    return basis
