"""Braces, enveloping presentations, loop algebras, and the half-PBW check."""

from fractions import Fraction

import pytest

from confgsb.engine import Engine
from confgsb.envelope import (
    HalfPBWReport,
    brace,
    commutator,
    enveloping_presentation,
    half_pbw_check,
    lie_algebra,
    lie_conformal,
    lie_relation,
    loop_conformal,
    validate_lie,
    bracket,
)
from confgsb.indices import index_add, index_sub, iter_box, sign_of, factorial_multi
from confgsb.words import (
    AlgebraSignature,
    ConfPoly,
    NormalWord,
    compare_words,
    prepend_link,
    single_word,
)

SIG22 = AlgebraSignature(2, (2, 2), ("a", "b"))
ENG22 = Engine(SIG22)

SIG22_1 = AlgebraSignature(2, (2, 2), ("a",))
ENG22_1 = Engine(SIG22_1)


def word(links, tail, taild=(0, 0)):
    return NormalWord(tuple(links), tail, tuple(taild))


def sl2():
    # basis ordered f < h < e; [h, f] = -2f, [e, f] = h, [e, h] = -2e
    return lie_algebra(("f", "h", "e"), {
        (1, 0): ((0, -2),),
        (2, 0): ((1, 1),),
        (2, 1): ((2, -2),),
    })


# -- Lie algebra validation -----------------------------------------------------


def test_validate_sl2():
    assert validate_lie(sl2())


def test_validate_heisenberg():
    g = lie_algebra(("x", "y", "z"), {(1, 0): ((2, 1),)})
    assert validate_lie(g)


def test_validate_solvable():
    g = lie_algebra(("x", "y"), {(1, 0): ((1, 1),)})
    assert validate_lie(g)


def test_validate_rejects_broken_antisymmetry():
    g = lie_algebra(("x", "y"), {(1, 0): ((0, 1),), (0, 1): ((0, 1),)})
    assert not validate_lie(g)


def test_validate_rejects_nonzero_self_bracket():
    g = lie_algebra(("x", "y"), {(0, 0): ((1, 1),)})
    assert not validate_lie(g)


def test_validate_rejects_broken_jacobi():
    g = lie_algebra(("f", "h", "e"), {
        (1, 0): ((0, -3),),   # perturbed structure constant
        (2, 0): ((1, 1),),
        (2, 1): ((2, -2),),
    })
    assert not validate_lie(g)


def test_bracket_mirror_lookup():
    g = sl2()
    assert bracket(g, 1, 0) == {0: Fraction(-2)}
    assert bracket(g, 0, 1) == {0: Fraction(2)}
    assert bracket(g, 0, 0) == {}


# -- the brace transform ----------------------------------------------------------


def test_brace_at_minimal_locality_collapses():
    sig = AlgebraSignature(2, (1, 1), ("a", "b"))
    eng = Engine(sig)
    out = brace(eng, 1, (0, 0), ConfPoly.from_word(single_word(0, 2)))
    assert out == ConfPoly.from_word(word([(1, (0, 0))], 0))


def test_brace_value_with_derivation_tail():
    out = brace(ENG22, 1, (1, 0), ConfPoly.from_word(single_word(0, 2)))
    expected = (ConfPoly.from_word(word([(1, (1, 0))], 0), -2)
                + ConfPoly.from_word(word([(1, (1, 1))], 0, (0, 1))))
    assert out == expected


def test_brace_requires_valid_label():
    with pytest.raises(AssertionError):
        brace(ENG22, 0, (2, 0), ConfPoly.from_word(single_word(0, 2)))


def test_commutator_anticommutativity():
    # com(a_i, m, a_j) = -(braced transform of the mirrored commutators)
    sig = SIG22
    for i in range(2):
        for j in range(2):
            for m in iter_box(sig.locality):
                lhs = commutator(ENG22, i, m, j)
                total = ConfPoly.zero()
                for s in iter_box(index_sub(sig.locality, m)):
                    c = commutator(ENG22, j, index_add(m, s), i)
                    if c.is_zero():
                        continue
                    coeff = Fraction(sign_of(index_add(m, s)), factorial_multi(s))
                    total = total.add_scaled(ENG22.derive_multi(s, c), coeff)
                assert lhs == -total, (i, j, m)


# -- enveloping presentations ------------------------------------------------------


def test_presentation_abelian_rank_one_is_empty():
    sig = AlgebraSignature(2, (1, 1), ("a",))
    L = lie_conformal(sig, {})
    system = enveloping_presentation(L)
    assert len(system) == 0


def test_presentation_single_generator_locality_two():
    L = lie_conformal(SIG22_1, {})
    system = enveloping_presentation(L, ENG22_1)
    r_mixed = (ConfPoly.from_word(word([(0, (1, 0))], 0, (1, 0)))
               - ConfPoly.from_word(word([(0, (0, 1))], 0, (0, 1))))
    r_01 = (ConfPoly.from_word(word([(0, (1, 1))], 0, (1, 0)))
            - ConfPoly.from_word(word([(0, (0, 1))], 0), 3))
    r_10 = (ConfPoly.from_word(word([(0, (1, 1))], 0, (0, 1)))
            - ConfPoly.from_word(word([(0, (1, 0))], 0), 3))
    assert system.elements == [r_mixed, r_01, r_10]
    assert system.interreduce().elements == system.elements


def test_presentation_two_generators_zero_bracket():
    L = lie_conformal(SIG22, {})
    system = enveloping_presentation(L, ENG22)
    assert len(system) == 10
    leads = {p.leading_word() for p in system.elements}
    expected = set()
    for c in range(2):
        expected.add(word([(c, (1, 0))], c, (1, 0)))
        expected.add(word([(c, (1, 1))], c, (1, 0)))
        expected.add(word([(c, (1, 1))], c, (0, 1)))
    for m in iter_box(SIG22.locality):
        expected.add(word([(1, m)], 0))
    assert leads == expected
    assert system.interreduce().elements == system.elements


def test_loop_sl2_presentation():
    L = loop_conformal(sl2(), 2)
    assert L.signature == AlgebraSignature(2, (1, 1), ("f", "h", "e"))
    eng = Engine(L.signature)
    system = enveloping_presentation(L, eng)

    def rel(i, j, combo):
        out = (ConfPoly.from_word(word([(i, (0, 0))], j))
               - ConfPoly.from_word(word([(j, (0, 0))], i)))
        for k, c in combo:
            out = out.add_scaled(ConfPoly.from_word(single_word(k, 2)), -c)
        return out

    assert system.elements == [
        rel(1, 0, [(0, -2)]),
        rel(2, 0, [(1, 1)]),
        rel(2, 1, [(2, -2)]),
    ]
    assert system.check_gsb().is_gsb


def test_loop_abelian_presentation():
    g = lie_algebra(("x", "y", "z"), {})
    L = loop_conformal(g, 2)
    system = enveloping_presentation(L)
    assert len(system) == 3
    for p in system.elements:
        lead = p.leading_word()
        assert len(p.terms) == 2 and lead.length == 2


def test_loop_solvable_presentation_is_gsb():
    g = lie_algebra(("x", "y"), {(1, 0): ((1, 1),)})
    system = enveloping_presentation(loop_conformal(g, 2))
    assert system.check_gsb().is_gsb


def test_loop_conformal_rejects_invalid_lie():
    g = lie_algebra(("x", "y"), {(1, 0): ((0, 1),), (0, 1): ((0, 1),)})
    with pytest.raises(AssertionError):
        loop_conformal(g, 2)


def test_lie_conformal_rejects_long_table_values():
    bad = ConfPoly.from_word(word([(0, (0, 0))], 0))
    with pytest.raises(AssertionError):
        lie_conformal(AlgebraSignature(2, (1, 1), ("x", "y")), {(1, 0, (0, 0)): bad})


def test_lie_conformal_rejects_invalid_key():
    val = ConfPoly.from_word(single_word(0, 2))
    with pytest.raises(AssertionError):
        lie_conformal(AlgebraSignature(2, (1, 1), ("x", "y")), {(1, 0, (1, 0)): val})


# -- the half-PBW check --------------------------------------------------------------


def test_half_pbw_loop_sl2():
    report = half_pbw_check(loop_conformal(sl2(), 2))
    assert isinstance(report, HalfPBWReport)
    assert report.checked == 1
    assert report.ok


def test_half_pbw_abelian_locality_two():
    # At locality (2,2) the relation polynomials are not D-free, so interior
    # rewriting is unavailable and most of the mixed compositions stop at a
    # nonzero normal form even though each lies in the relation ideal (the
    # bounded completion of the same presentation reduces them all to zero).
    # The check must report those remainders rather than hide them.
    sig = AlgebraSignature(2, (2, 2), ("x", "y", "z"))
    L = lie_conformal(sig, {})
    report = half_pbw_check(L)
    assert report.checked == 16
    assert not report.ok
    assert len(report.failures) == 15
    keys = {key for key, _ in report.failures}
    assert (2, 1, 0, (1, 1), (1, 1)) not in keys, "the sparsest instance reduces to zero"
    for (i, j, k, m, mp), remainder in report.failures:
        assert (i, j, k) == (2, 1, 0)
        assert not remainder.is_zero()
        top = prepend_link(i, m, prepend_link(j, mp, single_word(k, 2)))
        assert compare_words(remainder.leading_word(), top) < 0
    # deterministic: a second run reports identical remainders
    again = half_pbw_check(L)
    assert again == report


def test_half_pbw_detects_broken_jacobi():
    # corrupted sl2 table bypassing the Lie validation of loop_conformal
    sig = AlgebraSignature(2, (1, 1), ("f", "h", "e"))
    z = (0, 0)
    table = {
        (1, 0, z): ConfPoly.from_word(single_word(0, 2), -3),
        (2, 0, z): ConfPoly.from_word(single_word(1, 2)),
        (2, 1, z): ConfPoly.from_word(single_word(2, 2), -2),
    }
    report = half_pbw_check(lie_conformal(sig, table))
    assert report.checked == 1
    assert not report.ok
    (key, remainder), = report.failures
    assert key == (2, 1, 0, (0, 0), (0, 0))
    assert remainder == ConfPoly.from_word(single_word(1, 2), -1)


def test_relation_heads_are_leading():
    L = lie_conformal(SIG22, {})
    for m in iter_box(SIG22.locality):
        rel = lie_relation(ENG22, L, 1, 0, m)
        assert rel.leading_term() == (word([(1, m)], 0), 1)
