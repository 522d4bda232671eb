"""Occurrence matching, reduction traces, compositions, and completion."""

import random
from fractions import Fraction

import pytest

from confgsb.engine import Engine
from confgsb.rewrite import (
    BOUNDED_COMPLETE,
    COMPLETE,
    INCLUSION,
    INTERSECTION,
    LEFT_MUL,
    LIMIT_REACHED,
    RIGHT_INCLUSION,
    RIGHT_MUL,
    Occurrence,
    RewriteSystem,
    complete,
)
from confgsb.words import AlgebraSignature, ConfPoly, NormalWord, compare_words, single_word

SIG = AlgebraSignature(2, (2, 2), ("a",))
ENG = Engine(SIG)


def w(*labels, taild=(0, 0)):
    return NormalWord(tuple((0, m) for m in labels), 0, tuple(taild))


def mono(*labels, taild=(0, 0), c=1):
    return ConfPoly.from_word(w(*labels, taild=taild), c)


F = mono((0, 0)) - mono()
G = mono((1, 0), (1, 0))
H = mono((0, 1), (0, 1))
P = mono((1, 1), (1, 0))
Q = mono((1, 1), (0, 1))
S = mono((1, 1), (1, 1))
GOLDEN = [F, G, H, P, Q, S]


def golden_system():
    return RewriteSystem(ENG, GOLDEN)


# -- occurrences -------------------------------------------------------------


def test_interior_occurrence_only():
    sys_f = RewriteSystem(ENG, [F])
    occs = sys_f.find_occurrences(w((0, 0), (1, 0)))
    assert occs == [Occurrence(0, 0, False)]


def test_no_occurrence():
    sys_f = RewriteSystem(ENG, [F])
    assert sys_f.find_occurrences(w((1, 0))) == []


def test_suffix_occurrence_with_dshift():
    sys_g2 = RewriteSystem(ENG, [mono((1, 0))])
    occs = sys_g2.find_occurrences(w((1, 0), taild=(2, 1)))
    assert occs == [Occurrence(0, 0, True, (2, 1))]


def test_occurrences_sorted_by_position_then_kind():
    sys_f = RewriteSystem(ENG, [F])
    occs = sys_f.find_occurrences(w((0, 0), (0, 0)))
    assert occs == [Occurrence(0, 0, False), Occurrence(0, 1, True, (0, 0))]


def test_suffix_occurrence_needs_componentwise_dominance():
    elem = mono((1, 0), taild=(1, 1))
    sys_e = RewriteSystem(ENG, [elem])
    # word taild (2, 0) does not dominate the pattern taild (1, 1)
    assert sys_e.find_occurrences(w((1, 0), taild=(2, 0))) == []
    assert sys_e.find_occurrences(w((1, 0), taild=(2, 1))) == [
        Occurrence(0, 0, True, (1, 0))
    ]


# -- S-words ------------------------------------------------------------------


def test_build_sword_interior():
    sys_f = RewriteSystem(ENG, [F])
    target = w((0, 0), (1, 0))
    sword = sys_f.build_sword(target, Occurrence(0, 0, False))
    assert sword == ConfPoly.from_word(target) - mono((1, 0))


def test_build_sword_suffix():
    sys_f = RewriteSystem(ENG, [F])
    target = w((0, 0), taild=(1, 0))
    sword = sys_f.build_sword(target, Occurrence(0, 0, True, (1, 0)))
    assert sword == ConfPoly.from_word(target) - mono(taild=(1, 0))


# -- reduction ----------------------------------------------------------------


def test_reduce_two_steps_to_generator():
    sys_f = RewriteSystem(ENG, [F])
    start = ConfPoly.from_word(w((0, 0), (0, 0)))
    remainder, trace = sys_f.reduce(start)
    assert remainder == mono()
    assert len(trace) == 2
    assert trace.elements_used() == {0}
    assert start == remainder + trace.replay(sys_f)


def test_reduce_element_to_zero():
    sys_f = RewriteSystem(ENG, [F])
    remainder, trace = sys_f.reduce(F)
    assert remainder.is_zero()
    assert len(trace) == 1


def test_reduce_exclude_blocks_element():
    sys_f = RewriteSystem(ENG, [F])
    remainder, trace = sys_f.reduce(F, exclude=frozenset({0}))
    assert remainder == F
    assert len(trace) == 0


def test_trace_words_strictly_descend():
    system = golden_system()
    start = ConfPoly.from_word(w((0, 0), (0, 0), (0, 0))) + mono((0, 0), c=3)
    remainder, trace = system.reduce(start)
    words = [step.word for step in trace.steps]
    assert all(compare_words(b, a) < 0 for a, b in zip(words, words[1:]))
    assert start == remainder + trace.replay(system)


def random_poly(rng):
    terms = ConfPoly.zero()
    for _ in range(rng.randrange(1, 5)):
        length = rng.randrange(1, 5)
        labels = [(rng.randrange(2), rng.randrange(2)) for _ in range(length - 1)]
        taild = (rng.randrange(3), rng.randrange(3))
        coeff = rng.choice([1, -1, 2, -2, Fraction(1, 2), Fraction(-3, 2)])
        terms = terms.add_scaled(mono(*labels, taild=taild), coeff)
    return terms


def test_trace_replay_on_random_polynomials():
    system = golden_system()
    rng = random.Random(7)
    for _ in range(40):
        p = random_poly(rng)
        remainder, trace = system.reduce(p)
        assert p == remainder + trace.replay(system)
        # the remainder really is irreducible
        again, trace2 = system.reduce(remainder)
        assert again == remainder and len(trace2) == 0


def test_reduction_confluent_on_completed_system():
    system, status = complete(ENG, [F])
    assert status == COMPLETE
    rng = random.Random(13)
    for _ in range(30):
        p = random_poly(rng)
        base, _ = system.reduce(p)
        for seed in range(3):
            alt, _ = system.reduce(p, rng=random.Random(seed))
            assert alt == base


# -- overlap tasks and their evaluations --------------------------------------


def test_self_overlap_of_quadratic_relation():
    sys_f = RewriteSystem(ENG, [F])
    tasks = sys_f.overlap_tasks(0, 0)
    assert [t.kind for t in tasks] == [INTERSECTION]
    task = tasks[0]
    assert task.w == w((0, 0), (0, 0)) and task.c == 1
    assert sys_f.eval_composition(task).is_zero()


def test_intersection_f_with_g_evaluates_to_minus_g():
    system = RewriteSystem(ENG, [F, G])
    tasks = system.overlap_tasks(0, 1)
    assert [t.kind for t in tasks] == [INTERSECTION]
    task = tasks[0]
    assert task.w == w((0, 0), (1, 0), (1, 0))
    assert system.eval_composition(task) == -G


def test_self_overlaps_of_cubic_relation_vanish():
    sys_g = RewriteSystem(ENG, [G])
    tasks = sys_g.overlap_tasks(0, 0)
    assert [t.kind for t in tasks] == [INTERSECTION, INTERSECTION]
    by_c = {t.c: t for t in tasks}
    assert by_c[1].w == w((1, 0), (1, 0), (1, 0), (1, 0))
    assert by_c[2].w == w((1, 0), (1, 0), (1, 0))
    assert sys_g.eval_composition(by_c[1]).is_zero()
    assert sys_g.eval_composition(by_c[2]).is_zero()


def test_intersection_g_with_q_reduces_via_s():
    system = RewriteSystem(ENG, [G, Q, S])
    tasks = [t for t in system.overlap_tasks(0, 1) if t.c == 1]
    assert len(tasks) == 1
    task = tasks[0]
    assert task.w == w((1, 0), (1, 0), (1, 1), (0, 1))
    comp = system.eval_composition(task)
    expected = (mono((1, 0), (0, 0), (1, 1), (1, 1), c=-2)
                + mono((0, 0), (1, 0), (1, 1), (1, 1), c=-2))
    assert comp == expected
    remainder, _ = RewriteSystem(ENG, [S]).reduce(comp)
    assert remainder.is_zero()


def test_intersection_g_with_h_needs_s_not_just_q():
    system = RewriteSystem(ENG, [G, H])
    tasks = [t for t in system.overlap_tasks(0, 1) if t.c == 1]
    task = tasks[0]
    assert task.w == w((1, 0), (1, 0), (0, 1), (0, 1))
    comp = system.eval_composition(task)
    expected = (mono((1, 0), (0, 0), (1, 1), (0, 1), c=-1)
                + mono((0, 0), (1, 0), (1, 1), (0, 1), c=-1)
                + mono((0, 0), (0, 0), (1, 1), (1, 1), c=2))
    assert comp == expected
    # q alone eliminates the two q-suffixed words but leaves the s-suffixed one
    rem_q, _ = RewriteSystem(ENG, [Q]).reduce(comp)
    assert rem_q == mono((0, 0), (0, 0), (1, 1), (1, 1), c=2)
    rem_qs, _ = RewriteSystem(ENG, [Q, S]).reduce(comp)
    assert rem_qs.is_zero()


def test_right_inclusion_same_pattern_different_tails():
    e1 = mono((1, 0), taild=(1, 1))
    e2 = mono((1, 0), taild=(1, 0))
    system = RewriteSystem(ENG, [e1, e2])
    t01 = system.overlap_tasks(0, 1)
    assert [t.kind for t in t01] == [RIGHT_INCLUSION]
    assert t01[0].alpha == (0, 0) and t01[0].beta == (0, 1)
    assert t01[0].w == w((1, 0), taild=(1, 1))
    assert system.eval_composition(t01[0]).is_zero()
    t10 = system.overlap_tasks(1, 0)
    assert [t.kind for t in t10] == [RIGHT_INCLUSION]
    assert t10[0].alpha == (0, 1) and t10[0].beta == (0, 0)
    assert t10[0].w == w((1, 0), taild=(1, 1))
    assert system.eval_composition(t10[0]).is_zero()


def test_right_inclusion_mixed_tail_supports():
    e3 = mono((1, 0), taild=(2, 0))
    e4 = mono((1, 0), taild=(0, 1))
    system = RewriteSystem(ENG, [e3, e4])
    tasks = system.overlap_tasks(0, 1)
    assert [t.kind for t in tasks] == [RIGHT_INCLUSION]
    task = tasks[0]
    assert task.alpha == (0, 1) and task.beta == (2, 0)
    assert task.w == w((1, 0), taild=(2, 1))
    assert system.eval_composition(task) == mono((0, 0), taild=(1, 1), c=2)


def test_right_inclusion_skips_identity_pair():
    sys_f = RewriteSystem(ENG, [F])
    assert all(t.kind != RIGHT_INCLUSION for t in sys_f.overlap_tasks(0, 0))


def test_inclusion_of_short_pattern_with_junction():
    big = ConfPoly.from_word(w((1, 0), (1, 0))) + mono()
    small = mono((1, 0))
    system = RewriteSystem(ENG, [big, small])
    tasks = system.overlap_tasks(0, 1)
    kinds = [t.kind for t in tasks]
    assert kinds == [INCLUSION, RIGHT_INCLUSION, INTERSECTION]
    inc = tasks[0]
    assert inc.pos == 0 and inc.w == w((1, 0), (1, 0))
    assert system.eval_composition(inc) == mono()


# -- multiplication tasks ------------------------------------------------------


def test_multiplication_bounds():
    system = golden_system()
    assert system.multiplication_bounds(F) == (3, 3)
    assert system.multiplication_bounds(mono()) == (2, 2)
    assert system.multiplication_bounds(G) == (2, 4)
    assert system.multiplication_bounds(Q) == (3, 2)
    assert system.multiplication_bounds(mono(taild=(1, 0))) == (3, 2)


def test_multiplication_tasks_for_dfree_quadratic():
    sys_f = RewriteSystem(ENG, [F])
    tasks = sys_f.multiplication_tasks(0)
    assert all(t.kind == LEFT_MUL for t in tasks)
    assert sorted(t.m for t in tasks) == [(0, 2), (1, 2), (2, 0), (2, 1), (2, 2)]
    by_m = {t.m: t for t in tasks}
    assert sys_f.eval_composition(by_m[(2, 0)]) == 2 * G
    assert sys_f.eval_composition(by_m[(0, 2)]) == 2 * H
    assert sys_f.eval_composition(by_m[(2, 1)]) == 2 * P
    assert sys_f.eval_composition(by_m[(1, 2)]) == 2 * Q
    assert sys_f.eval_composition(by_m[(2, 2)]) == 4 * S


def test_multiplication_tasks_for_derived_generator():
    sys_d = RewriteSystem(ENG, [mono(taild=(1, 0))])
    tasks = sys_d.multiplication_tasks(0)
    left = [t for t in tasks if t.kind == LEFT_MUL]
    right = [t for t in tasks if t.kind == RIGHT_MUL]
    assert sorted(t.m for t in left) == [(2, 0), (2, 1)]
    assert sorted(t.m for t in right) == [
        (0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)]
    by_m = {t.m: t for t in right}
    assert sys_d.eval_composition(by_m[(2, 1)]) == mono((1, 1), c=-2)
    assert sys_d.eval_composition(by_m[(0, 1)]).is_zero()


def test_boundary_vanishing_is_checked_under_audit():
    checked = Engine(SIG, check=True)
    system = RewriteSystem(checked, [F - G])
    before = checked.invariant_checks
    system.multiplication_tasks(0)
    assert checked.invariant_checks > before


# -- interreduction ------------------------------------------------------------


def test_interreduce_removes_redundant_combination():
    system = RewriteSystem(ENG, [F, F + G, G])
    reduced = system.interreduce()
    assert reduced.elements == [F, G]


def test_interreduce_rescales_to_monic():
    system = RewriteSystem(ENG, [2 * F])
    assert system.elements == [F]  # construction already normalizes
    assert system.interreduce().elements == [F]


def test_interreduce_fixes_golden_system():
    system = golden_system()
    assert system.interreduce().elements == GOLDEN


# -- completion ----------------------------------------------------------------


def test_complete_golden_quadratic():
    system, status = complete(ENG, [F])
    assert status == COMPLETE
    assert len(system) == 6
    assert set(map(tuple, (p.items_desc() for p in system.elements))) == \
        set(map(tuple, (p.items_desc() for p in GOLDEN)))
    report = system.check_gsb()
    assert report.is_gsb and not report.has_non_dfree


def test_complete_empty_input():
    system, status = complete(ENG, [])
    assert status == COMPLETE and len(system) == 0


def test_complete_single_word_relation():
    r = mono((0, 0))
    system, status = complete(ENG, [r])
    assert status == COMPLETE
    leads = {p.leading_word() for p in system.elements}
    assert leads == {w((0, 0)), w((1, 0), (1, 0)), w((0, 1), (0, 1)),
                     w((1, 1), (1, 0)), w((1, 1), (0, 1)), w((1, 1), (1, 1))}
    assert system.check_gsb().is_gsb


def test_complete_idempotent_and_deterministic():
    first, status1 = complete(ENG, [F])
    second, status2 = complete(ENG, first.elements)
    third, status3 = complete(ENG, [F])
    assert status1 == status2 == status3 == COMPLETE
    assert second.elements == first.elements == third.elements


def test_complete_respects_step_limit():
    system, status = complete(ENG, [F], max_steps=1)
    assert status == LIMIT_REACHED
    assert len(system) == 1


def test_complete_respects_element_limit():
    system, status = complete(ENG, [F], max_elements=2)
    assert status == LIMIT_REACHED
    assert len(system) == 2


def test_complete_degree_bound_discards():
    system, status = complete(ENG, [F], max_degree=2)
    assert status == BOUNDED_COMPLETE
    assert system.elements == [F]


def test_complete_under_audit():
    checked = Engine(SIG, check=True)
    system, status = complete(checked, [F])
    assert status == COMPLETE and len(system) == 6
    assert checked.invariant_checks > 0


# -- basis of irreducibles and membership ---------------------------------------


def test_irreducible_words_of_golden_system():
    system, _ = complete(ENG, [F])
    words = system.irreducible_words(3)
    by_len = {}
    for u in words:
        by_len.setdefault(u.length, []).append(u)
    assert by_len[1] == [w()]
    assert set(by_len[2]) == {w((0, 1)), w((1, 0)), w((1, 1))}
    assert set(by_len[3]) == {w((0, 1), (1, 0)), w((0, 1), (1, 1)),
                              w((1, 0), (0, 1)), w((1, 0), (1, 1))}


def test_irreducible_words_with_tail_derivations():
    empty = RewriteSystem(ENG, [])
    words = empty.irreducible_words(1, max_taild=(1, 1))
    assert words == [w(), w(taild=(0, 1)), w(taild=(1, 0)), w(taild=(1, 1))]


def test_irreducible_words_ascending():
    system, _ = complete(ENG, [F])
    words = system.irreducible_words(3)
    keys = [u.weight_key() for u in words]
    assert keys == sorted(keys)


def test_ideal_membership():
    system, _ = complete(ENG, [F])
    assert system.ideal_membership(F)
    assert system.ideal_membership(ENG.derive(0, F))
    assert system.ideal_membership(ENG.derive_multi((2, 1), G))
    assert not system.ideal_membership(mono())
    assert not system.ideal_membership(mono((1, 0)))
    assert not system.ideal_membership(mono((0, 0)))


def test_check_gsb_flags_incomplete_system():
    sys_f = RewriteSystem(ENG, [F])
    report = sys_f.check_gsb()
    assert not report.is_gsb
    kinds = {task.kind for task, _ in report.failures}
    assert kinds == {LEFT_MUL}


def test_zero_element_rejected():
    with pytest.raises(AssertionError):
        RewriteSystem(ENG, [ConfPoly.zero()])
