"""Free associative Z-algebra on named generators.

An :class:`NCPoly` is a sparse map from words (tuples of generators) to nonzero
Python integers. Words multiply by concatenation, so nothing commutes. The text
form is ``3*a.b.c + -1*c.a`` with the empty word written ``1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

__all__ = [
    "GeneratorId",
    "NCPoly",
    "gen",
    "gens",
    "nc_add",
    "nc_mul",
    "commutator_k",
    "multi_commutator",
    "evaluate",
    "parse_ncpoly",
]

_NAME_RE = re.compile(r"[A-Za-z_]+\Z")
_LETTER_RE = re.compile(r"([A-Za-z_]+)(\d*)\Z")


@dataclass(frozen=True, order=True)
class GeneratorId:
    name: str
    index: int = 0

    def __post_init__(self):
        if not _NAME_RE.match(self.name):
            raise ValueError(f"generator name must be letters/underscore only: {self.name!r}")
        if self.index < 0:
            raise ValueError("generator index must be non-negative")

    def __str__(self) -> str:
        return self.name if self.index == 0 else f"{self.name}{self.index}"

    @classmethod
    def parse(cls, text: str) -> "GeneratorId":
        m = _LETTER_RE.match(text.strip())
        if not m:
            raise ValueError(f"bad generator: {text!r}")
        return cls(m.group(1), int(m.group(2) or 0))


Word = tuple  # tuple[GeneratorId, ...]


def _word_key(w: Word):
    return (len(w), w)


class NCPoly:
    """Element of the free Z-algebra. Immutable; zero coefficients never stored."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Word, int] | None = None):
        clean = {}
        if terms:
            for w, c in terms.items():
                c = int(c)
                if c:
                    clean[tuple(w)] = c
        self._terms = dict(sorted(clean.items(), key=lambda kv: _word_key(kv[0])))
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "NCPoly":
        # terms already nonzero; still sort so iteration order is canonical
        obj = cls.__new__(cls)
        obj._terms = dict(sorted(terms.items(), key=lambda kv: _word_key(kv[0])))
        obj._hash = None
        return obj

    @classmethod
    def zero(cls) -> "NCPoly":
        return cls()

    @classmethod
    def one(cls) -> "NCPoly":
        return cls({(): 1})

    @classmethod
    def const(cls, c: int) -> "NCPoly":
        return cls({(): c})

    @property
    def terms(self) -> Mapping[Word, int]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=-1)

    def generators(self) -> set[GeneratorId]:
        return {g for w in self._terms for g in w}

    def coefficient(self, word: Sequence[GeneratorId]) -> int:
        return self._terms.get(tuple(word), 0)

    def _coerce(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            return other
        if isinstance(other, int):
            return NCPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for w, c in other._terms.items():
            s = out.get(w, 0) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return NCPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly._raw({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return NCPoly()
            return NCPoly._raw({w: c * other for w, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                s = out.get(w, 0) + c1 * c2
                if s:
                    out[w] = s
                else:
                    out.pop(w, None)
        return NCPoly._raw(out)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = NCPoly.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = NCPoly.const(other)
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for w, c in self._terms.items():
            word = ".".join(str(g) for g in w) if w else "1"
            parts.append(f"{c}*{word}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"NCPoly({str(self)!r})"


def gen(name: str, index: int = 0) -> NCPoly:
    return NCPoly({(GeneratorId(name, index),): 1})


def gens(spec: str) -> list[NCPoly]:
    """``gens("a b c")`` -> three generator polynomials."""
    return [NCPoly({(GeneratorId.parse(t),): 1}) for t in spec.split()]


def parse_ncpoly(text: str) -> NCPoly:
    """Inverse of ``str(NCPoly)``.

    Accepts ``c*w`` terms joined by ``+``; a bare word means coefficient 1.
    """
    text = text.strip()
    if text == "0":
        return NCPoly()
    terms: dict = {}
    # split on '+' that separates terms; coefficients carry their own sign
    for chunk in re.split(r"\s\+\s", text):
        chunk = chunk.strip()
        if "*" in chunk:
            coef_s, word_s = chunk.split("*", 1)
            coef = int(coef_s)
        else:
            coef, word_s = 1, chunk
        word_s = word_s.strip()
        if word_s == "1":
            word: Word = ()
        else:
            word = tuple(GeneratorId.parse(t) for t in word_s.split("."))
        terms[word] = terms.get(word, 0) + coef
    return NCPoly(terms)


def nc_add(p: NCPoly, q: NCPoly) -> NCPoly:
    return p + q


def nc_mul(p: NCPoly, q: NCPoly) -> NCPoly:
    return p * q


def commutator_k(a, b, k: int):
    """Iterated commutator: ``[a,b]_0 = a``, ``[a,b]_k = [[a,b]_{k-1}, b]``.

    Works for anything supporting ``*`` and ``-`` (NCPoly, AlgElem, OrePoly).
    """
    if k < 0:
        raise ValueError("commutator index must be non-negative")
    c = a
    for _ in range(k):
        c = c * b - b * c
    return c


def multi_commutator(a, bs: Sequence, ks: Sequence[int]):
    """Left-to-right fold ``[...[a, b_1]_{k_1}, ..., b_p]_{k_p}``."""
    if len(bs) != len(ks):
        raise ValueError(f"length mismatch: {len(bs)} elements vs {len(ks)} indices")
    c = a
    for b, k in zip(bs, ks):
        c = commutator_k(c, b, k)
    return c


def evaluate(p: NCPoly, assignment: Mapping, target):
    """Image of ``p`` under the homomorphism sending generators to ``assignment``.

    ``assignment`` may be keyed by :class:`GeneratorId` or by its string form.
    The empty word maps to the unit of ``target`` (which must then be unital).
    """
    lookup = {}
    for key, val in assignment.items():
        g = key if isinstance(key, GeneratorId) else GeneratorId.parse(str(key))
        lookup[g] = val
    missing = p.generators() - lookup.keys()
    if missing:
        names = ", ".join(sorted(str(g) for g in missing))
        raise ValueError(f"assignment is missing generator(s): {names}")
    total = target.zero()
    cache: dict = {}
    for w, c in p.items():
        val = _eval_word(w, lookup, target, cache)
        total = total + val * c
    return total


def _eval_word(w: Word, lookup, target, cache):
    if w in cache:
        return cache[w]
    if not w:
        val = target.one()
    elif len(w) == 1:
        val = lookup[w[0]]
    else:
        val = _eval_word(w[:-1], lookup, target, cache) * lookup[w[-1]]
    cache[w] = val
    return val


def word_from_names(names: Iterable[str]) -> Word:
    return tuple(GeneratorId.parse(n) for n in names)
