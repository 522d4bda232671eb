"""Core data types: signatures, normal words, polynomials, expression trees.

A *normal word* is the canonical basis element of the free algebra: a
right-normed product

    a1<m1> ( a2<m2> ( ... ak<mk> ( D^i a[k+1] ) ... ) )

stored flat as a chain of (generator, label) links, a tail generator and a
tail derivation exponent.  Every label must be valid for the signature's
locality bound.  Polynomials are sparse maps from normal words to nonzero
rationals.

Words are well-ordered by weight: length first, then the interleaved
generator/label sequence left to right, then the tail generator, then the
tail exponent.  Generators compare by declaration position (later = greater).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple, Union

from .indices import MultiIndex, is_valid_index, zero_index


@dataclass(frozen=True)
class AlgebraSignature:
    """Number of derivations, locality bound N, and the ordered generators."""

    n: int
    locality: MultiIndex
    generators: tuple[str, ...]

    def __post_init__(self):
        assert self.n >= 1, self.n
        assert len(self.locality) == self.n, (self.locality, self.n)
        assert all(nt >= 1 for nt in self.locality), self.locality
        assert len(set(self.generators)) == len(self.generators), self.generators
        assert self.generators, "at least one generator required"

    def is_valid(self, m: MultiIndex) -> bool:
        return is_valid_index(m, self.locality)

    def gen_index(self, name: str) -> int:
        try:
            return self.generators.index(name)
        except ValueError:
            raise KeyError(f"unknown generator {name!r}") from None

    def zero_exp(self) -> MultiIndex:
        return zero_index(self.n)


class NormalWord(NamedTuple):
    """Immutable normal word; generators are stored as signature indices."""

    links: tuple[tuple[int, MultiIndex], ...]
    tail: int
    taild: MultiIndex

    @property
    def length(self) -> int:
        return len(self.links) + 1

    def is_dfree(self) -> bool:
        return not any(self.taild)

    def gens(self) -> tuple[int, ...]:
        return tuple(g for g, _ in self.links) + (self.tail,)

    def labels(self) -> tuple[MultiIndex, ...]:
        return tuple(m for _, m in self.links)

    def link_sum(self, t: int) -> int:
        """Total t-component carried by the word's labels (tail exponent excluded)."""
        return sum(m[t] for _, m in self.links)

    def grade(self, t: int) -> int:
        """Conserved t-grading: label sum minus tail exponent.

        Every normalization rule preserves this quantity (each product adds
        its own label, each derivation lowers it by one), so it grades the
        whole algebra.  The tail exponent counts *negatively*: axiom (iii)
        trades one derivation for one unit of label.
        """
        return self.link_sum(t) - self.taild[t]

    def weight_key(self) -> tuple[int, ...]:
        """Flattened weight tuple; tuple comparison realizes the word order."""
        key = [self.length]
        for g, m in self.links:
            key.append(g)
            key.extend(m)
        key.append(self.tail)
        key.extend(self.taild)
        return tuple(key)


def single_word(gen: int, n: int, taild: MultiIndex | None = None) -> NormalWord:
    return NormalWord((), gen, taild if taild is not None else zero_index(n))


def prepend_link(gen: int, m: MultiIndex, w: NormalWord) -> NormalWord:
    return NormalWord(((gen, m),) + w.links, w.tail, w.taild)


def check_word(sig: AlgebraSignature, w: NormalWord) -> NormalWord:
    """Validate a word against the signature (labels valid, gens in range)."""
    for g, m in w.links:
        assert 0 <= g < len(sig.generators), (g, sig.generators)
        assert sig.is_valid(m), (m, sig.locality)
    assert 0 <= w.tail < len(sig.generators), w.tail
    assert len(w.taild) == sig.n and all(c >= 0 for c in w.taild), w.taild
    return w


class ConfPoly:
    """Sparse polynomial: map from normal words to nonzero rationals.

    Instances behave like values (frozen after construction); arithmetic is
    by dict merging.  Iteration orders terms by descending weight so the
    leading term is always first.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[NormalWord, Fraction] | None = None):
        self.terms: dict[NormalWord, Fraction] = {}
        if terms:
            for w, c in terms.items():
                if c:
                    self.terms[w] = Fraction(c)

    @classmethod
    def _raw(cls, terms: dict[NormalWord, Fraction]) -> "ConfPoly":
        # internal: caller guarantees no zero coefficients
        p = cls.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def zero(cls) -> "ConfPoly":
        return cls._raw({})

    @classmethod
    def from_word(cls, w: NormalWord, coeff: Fraction | int = 1) -> "ConfPoly":
        c = Fraction(coeff)
        return cls._raw({w: c}) if c else cls._raw({})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, ConfPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    def items_desc(self) -> list[tuple[NormalWord, Fraction]]:
        return sorted(self.terms.items(), key=lambda wc: wc[0].weight_key(), reverse=True)

    def __iter__(self) -> Iterator[tuple[NormalWord, Fraction]]:
        return iter(self.items_desc())

    def leading_term(self) -> tuple[NormalWord, Fraction]:
        assert self.terms, "leading term of the zero polynomial"
        w = max(self.terms, key=NormalWord.weight_key)
        return w, self.terms[w]

    def leading_word(self) -> NormalWord:
        return self.leading_term()[0]

    def degree(self) -> int:
        """Length of the leading word (0 for the zero polynomial)."""
        return self.leading_word().length if self.terms else 0

    def coeff(self, w: NormalWord) -> Fraction:
        return self.terms.get(w, Fraction(0))

    def __add__(self, other: "ConfPoly") -> "ConfPoly":
        return self.add_scaled(other, Fraction(1))

    def __sub__(self, other: "ConfPoly") -> "ConfPoly":
        return self.add_scaled(other, Fraction(-1))

    def __neg__(self) -> "ConfPoly":
        return self._raw({w: -c for w, c in self.terms.items()})

    def __mul__(self, scalar) -> "ConfPoly":
        c = Fraction(scalar)
        if not c:
            return ConfPoly.zero()
        return self._raw({w: c * v for w, v in self.terms.items()})

    __rmul__ = __mul__

    def add_scaled(self, other: "ConfPoly", coeff: Fraction | int) -> "ConfPoly":
        """self + coeff * other, dropping cancellations."""
        c = Fraction(coeff)
        if not c:
            return self
        out = dict(self.terms)
        for w, v in other.terms.items():
            acc = out.get(w, 0) + c * v
            if acc:
                out[w] = acc
            else:
                out.pop(w, None)
        return self._raw(out)

    def monic(self) -> "ConfPoly":
        _, lc = self.leading_term()
        if lc == 1:
            return self
        inv = 1 / lc
        return self._raw({w: inv * c for w, c in self.terms.items()})

    def is_dfree(self) -> bool:
        return all(w.is_dfree() for w in self.terms)

    def map_words(self, fn) -> "ConfPoly":
        out: dict[NormalWord, Fraction] = {}
        for w, c in self.terms.items():
            nw = fn(w)
            acc = out.get(nw, 0) + c
            if acc:
                out[nw] = acc
            else:
                out.pop(nw, None)
        return self._raw(out)

    def __repr__(self) -> str:
        if not self.terms:
            return "ConfPoly(0)"
        parts = [f"{c}*{w.links}|{w.tail}|{w.taild}" for w, c in self.items_desc()]
        return "ConfPoly(" + " + ".join(parts) + ")"


def add_scaled(p: ConfPoly, q: ConfPoly, coeff: Fraction | int) -> ConfPoly:
    return p.add_scaled(q, coeff)


def compare_words(u: NormalWord, v: NormalWord) -> int:
    """Three-way comparison in the word well-order."""
    ku, kv = u.weight_key(), v.weight_key()
    return (ku > kv) - (ku < kv)


# --- expression trees -------------------------------------------------------
#
# Input syntax for the engine: leaves are (possibly derived) generators and
# nodes are labelled binary products.  A parsed expression is a linear
# combination of trees (list of (coefficient, tree) pairs).


@dataclass(frozen=True)
class Leaf:
    gen: int
    dexp: MultiIndex


@dataclass(frozen=True)
class Node:
    left: "ExprTree"
    label: MultiIndex
    right: "ExprTree"


ExprTree = Union[Leaf, Node]
LinComb = list[tuple[Fraction, ExprTree]]


def tree_leaves(tree: ExprTree) -> int:
    if isinstance(tree, Leaf):
        return 1
    return tree_leaves(tree.left) + tree_leaves(tree.right)


def tree_grade(tree: ExprTree, t: int) -> int:
    """t-grading of a tree: node labels count +1 each, leaf exponents -1.

    Matches NormalWord.grade — every word in the normal form of a tree
    carries exactly this grade, coordinate by coordinate.
    """
    if isinstance(tree, Leaf):
        return -tree.dexp[t]
    return tree.label[t] + tree_grade(tree.left, t) + tree_grade(tree.right, t)


def tree_is_dfree(tree: ExprTree) -> bool:
    if isinstance(tree, Leaf):
        return not any(tree.dexp)
    return tree_is_dfree(tree.left) and tree_is_dfree(tree.right)
