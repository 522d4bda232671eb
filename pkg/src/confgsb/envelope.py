"""Lie-side applications: braces, enveloping presentations, half-PBW checks.

A Lie conformal structure is given by a multiplication table over the
generators; its universal enveloping associative algebra is presented by
relations a_i<m> a_j - {a_j<m> a_i} - table(i, j, m), where {.} is the
brace (skew) transform.  Loop algebras embed an ordinary Lie algebra at
locality (1, ..., 1).  The half-PBW check reduces the mixed compositions
s_ij<m'> a_k - a_i<m> s_jk against the presentation and reports any
nonzero remainders.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .engine import Engine
from .indices import (
    MultiIndex,
    factorial_multi,
    index_add,
    index_sub,
    iter_box,
    sign_of,
    zero_index,
)
from .rewrite import RewriteSystem
from .words import AlgebraSignature, ConfPoly, check_word, prepend_link, single_word


# -- ordinary Lie algebras -----------------------------------------------------


@dataclass(frozen=True)
class LieAlgebraSpec:
    """A finite-dimensional Lie algebra by basis and structure constants.

    ``brackets`` maps an ordered pair (i, j) of basis indices to the
    expansion of [a_i, a_j]; a missing mirror pair is taken to be the
    negation of the stored one.
    """

    basis: tuple[str, ...]
    brackets: dict[tuple[int, int], tuple[tuple[int, Fraction], ...]]


def lie_algebra(basis, brackets) -> LieAlgebraSpec:
    """Normalize raw bracket data into a LieAlgebraSpec."""
    basis = tuple(basis)
    dim = len(basis)
    norm = {}
    for (i, j), combo in brackets.items():
        assert 0 <= i < dim and 0 <= j < dim, (i, j)
        entries = []
        for k, c in combo:
            assert 0 <= k < dim, k
            c = Fraction(c)
            if c:
                entries.append((k, c))
        if entries:
            norm[(i, j)] = tuple(sorted(entries))
    return LieAlgebraSpec(basis, norm)


def bracket(g: LieAlgebraSpec, i: int, j: int) -> dict[int, Fraction]:
    """[a_i, a_j] as a basis combination, using antisymmetry for mirrors."""
    if (i, j) in g.brackets:
        return dict(g.brackets[(i, j)])
    if (j, i) in g.brackets:
        return {k: -c for k, c in g.brackets[(j, i)]}
    return {}


def _bracket_combo(g: LieAlgebraSpec, combo: dict[int, Fraction], j: int) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for l, c in combo.items():
        for k, ck in bracket(g, l, j).items():
            v = out.get(k, Fraction(0)) + c * ck
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out


def validate_lie(g: LieAlgebraSpec) -> bool:
    """Antisymmetry (stored mirrors and diagonal) plus Jacobi on all triples."""
    for (i, j), combo in g.brackets.items():
        if i == j and combo:
            return False
        if (j, i) in g.brackets and i != j:
            mirror = {k: -c for k, c in g.brackets[(j, i)]}
            if dict(combo) != mirror:
                return False
    dim = len(g.basis)
    for i in range(dim):
        for j in range(i):
            for k in range(j):
                total: dict[int, Fraction] = {}
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                    part = _bracket_combo(g, bracket(g, a, b), c)
                    for l, v in part.items():
                        nv = total.get(l, Fraction(0)) + v
                        if nv:
                            total[l] = nv
                        else:
                            total.pop(l, None)
                if total:
                    return False
    return True


# -- Lie conformal structures ---------------------------------------------------


@dataclass(frozen=True)
class LieConformalSpec:
    """A Lie conformal multiplication table over a signature.

    ``table`` maps (i, j, m) with i > j and valid m to the value of the
    Lie product a_i|m| a_j, a combination of length-1 normal words (the
    derivation-polynomial span of the generators).
    """

    signature: AlgebraSignature
    table: dict[tuple[int, int, MultiIndex], ConfPoly]


def lie_conformal(signature: AlgebraSignature, table) -> LieConformalSpec:
    """Validate and normalize a raw table into a LieConformalSpec."""
    norm = {}
    for (i, j, m), value in table.items():
        assert 0 <= j < i < len(signature.generators), (i, j)
        m = tuple(m)
        assert signature.is_valid(m), ("table key outside validity box", m)
        if value.is_zero():
            continue
        for w in value.terms:
            assert w.length == 1, ("table values must be length-1 combinations", w)
            check_word(signature, w)
        norm[(i, j, m)] = value
    return LieConformalSpec(signature, norm)


def table_entry(L: LieConformalSpec, i: int, j: int, m: MultiIndex) -> ConfPoly:
    """Lie product a_i|m| a_j for i >= j; the diagonal is zero (the unique
    antisymmetry-consistent completion of an off-diagonal table)."""
    assert i >= j, (i, j)
    if i == j:
        return ConfPoly.zero()
    return L.table.get((i, j, m), ConfPoly.zero())


# -- the brace transform ---------------------------------------------------------


def brace(engine: Engine, gen: int, m: MultiIndex, p: ConfPoly) -> ConfPoly:
    """Skew transform sum_s (-1)^{|m+s|} (1/s!) D^s (gen<m+s> p), s over the
    box where m+s stays valid."""
    sig = engine.sig
    assert sig.is_valid(m), m
    out = ConfPoly.zero()
    for s in iter_box(index_sub(sig.locality, m)):
        term = engine.mul_prefix_poly(gen, index_add(m, s), p)
        if term.is_zero():
            continue
        term = engine.derive_multi(s, term)
        out = out.add_scaled(term, Fraction(sign_of(index_add(m, s)), factorial_multi(s)))
    return out


def commutator(engine: Engine, i: int, m: MultiIndex, j: int) -> ConfPoly:
    """a_i<m> a_j - {a_j<m> a_i}: the conformal commutator of two generators."""
    n = engine.sig.n
    head = ConfPoly.from_word(prepend_link(i, m, single_word(j, n)))
    return head - brace(engine, j, m, ConfPoly.from_word(single_word(i, n)))


# -- enveloping presentations -----------------------------------------------------


def lie_relation(engine: Engine, L: LieConformalSpec, i: int, j: int,
                 m: MultiIndex) -> ConfPoly:
    """The defining relation a_i<m> a_j - {a_j<m> a_i} - table(i, j, m)."""
    return commutator(engine, i, m, j) - table_entry(L, i, j, m)


def enveloping_presentation(L: LieConformalSpec, engine: Engine | None = None) -> RewriteSystem:
    """Rewriting system of the universal enveloping associative algebra.

    One relation per pair i >= j and valid m; relations that normalize to
    zero are dropped, and the result is interreduced (hence stable under
    further interreduction).
    """
    if engine is None:
        engine = Engine(L.signature)
    assert engine.sig == L.signature, "engine signature mismatch"
    relations = []
    for i in range(len(L.signature.generators)):
        for j in range(i + 1):
            for m in iter_box(L.signature.locality):
                rel = lie_relation(engine, L, i, j, m)
                if not rel.is_zero():
                    relations.append(rel)
    return RewriteSystem(engine, relations).interreduce()


# -- the half-PBW check ------------------------------------------------------------


@dataclass(frozen=True)
class HalfPBWReport:
    """Outcome of the mixed-composition check over all i > j > k and valid
    labels; nonzero remainders indicate an invalid table (or an engine bug)."""

    checked: int
    failures: tuple[tuple[tuple[int, int, int, MultiIndex, MultiIndex], ConfPoly], ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def half_pbw_check(L: LieConformalSpec, engine: Engine | None = None) -> HalfPBWReport:
    """Reduce s_ij<m'> a_k - a_i<m> s_jk against the presentation for all
    i > j > k and valid m, m'; collect nonzero remainders."""
    if engine is None:
        engine = Engine(L.signature)
    system = enveloping_presentation(L, engine)
    sig = L.signature
    labels = list(iter_box(sig.locality))
    checked = 0
    failures = []
    for i in range(len(sig.generators)):
        for j in range(i):
            for k in range(j):
                unit_k = ConfPoly.from_word(single_word(k, sig.n))
                for m in labels:
                    s_ij = lie_relation(engine, L, i, j, m)
                    for mp in labels:
                        s_jk = lie_relation(engine, L, j, k, mp)
                        poly = (engine.mul_poly(s_ij, mp, unit_k)
                                - engine.mul_prefix_poly(i, m, s_jk))
                        remainder, _ = system.reduce(poly)
                        checked += 1
                        if not remainder.is_zero():
                            failures.append(((i, j, k, m, mp), remainder))
    return HalfPBWReport(checked, tuple(failures))


# -- loop algebras -------------------------------------------------------------------


def loop_conformal(g: LieAlgebraSpec, n: int) -> LieConformalSpec:
    """Loop Lie conformal structure of an ordinary Lie algebra: locality
    (1, ..., 1) and table entry (i, j, 0) = the bracket [a_i, a_j]."""
    assert validate_lie(g), "bracket table fails antisymmetry or the Jacobi identity"
    sig = AlgebraSignature(n, (1,) * n, g.basis)
    z = zero_index(n)
    table = {}
    for i in range(len(g.basis)):
        for j in range(i):
            combo = bracket(g, i, j)
            if combo:
                value = ConfPoly.zero()
                for k in sorted(combo):
                    value = value.add_scaled(
                        ConfPoly.from_word(single_word(k, n)), combo[k])
                table[(i, j, z)] = value
    return lie_conformal(sig, table)
