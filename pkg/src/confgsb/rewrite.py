"""Critical pairs, reduction, and completion for conformal rewriting systems.

A rewriting system is a sequence of monic relation polynomials.  Reduction
eliminates occurrences of leading words by subtracting engine-normalized
S-words, and records a trace that replays the elimination exactly.
Completion saturates a system with the five critical-pair composition
kinds until every composition reduces to zero, yielding a
Groebner-Shirshov basis whose irreducible normal words form a linear
basis of the quotient algebra.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from itertools import count, product

from .engine import Engine
from .indices import (
    MultiIndex,
    index_add,
    index_pos_part,
    iter_box,
    zero_index,
)
from .words import ConfPoly, NormalWord, compare_words, single_word

INCLUSION = "inclusion"
RIGHT_INCLUSION = "right-inclusion"
INTERSECTION = "intersection"
LEFT_MUL = "left-mul"
RIGHT_MUL = "right-mul"

KIND_RANK = {
    INCLUSION: 0,
    RIGHT_INCLUSION: 1,
    INTERSECTION: 2,
    LEFT_MUL: 3,
    RIGHT_MUL: 4,
}

COMPLETE = "complete"
BOUNDED_COMPLETE = "bounded-complete"
LIMIT_REACHED = "limit-reached"


@dataclass(frozen=True)
class Occurrence:
    """One match of a system element's leading word inside a normal word.

    With ``second`` False the pattern sits at generator position ``pos``
    with a link following it (shape u<m>s<m'>v, element D-free); with
    ``second`` True the pattern is a suffix of the word and the word's
    tail derivation exceeds the pattern's by ``dshift`` (shape
    u<m>D^dshift s).
    """

    elem: int
    pos: int
    second: bool
    dshift: MultiIndex | None = None


@dataclass(frozen=True)
class TraceStep:
    """One elimination: ``coeff`` times the S-word for ``occ`` at ``word``."""

    word: NormalWord
    occ: Occurrence
    coeff: Fraction


@dataclass(frozen=True)
class ReductionTrace:
    """Replayable record of the S-words subtracted during a reduction."""

    steps: tuple[TraceStep, ...]

    def __len__(self) -> int:
        return len(self.steps)

    def elements_used(self) -> set[int]:
        return {step.occ.elem for step in self.steps}

    def replay(self, system: "RewriteSystem") -> ConfPoly:
        """Rebuild the subtracted combination; input = remainder + replay."""
        total = ConfPoly.zero()
        for step in self.steps:
            total = total.add_scaled(system.build_sword(step.word, step.occ), step.coeff)
        return total


@dataclass(frozen=True)
class CompositionTask:
    """One critical-pair obligation between elements ``i`` and ``j``.

    Overlap kinds (inclusion, right-inclusion, intersection) carry the
    ambient word ``w`` whose two eliminations get subtracted.  The
    multiplication kinds carry the generator index in ``j`` and the
    product label ``m``; their ``w`` is a formal word used only to order
    the completion queue.
    """

    kind: str
    i: int
    j: int
    w: NormalWord
    pos: int = 0
    c: int = 0
    m: MultiIndex | None = None
    alpha: MultiIndex | None = None
    beta: MultiIndex | None = None

    def sort_key(self):
        return (self.w.weight_key(), KIND_RANK[self.kind], self.i, self.j)


@dataclass(frozen=True)
class GSBReport:
    """Outcome of check_gsb: the composition tasks with nonzero remainders.

    ``has_non_dfree`` warns that reduction-based triviality checking can
    over-reject when the system contains non-D-free elements, so for such
    systems a nonempty failure list is not a proof of incompleteness.
    """

    failures: tuple[tuple[CompositionTask, ConfPoly], ...]
    has_non_dfree: bool

    @property
    def is_gsb(self) -> bool:
        return not self.failures


def _labels_match(w: NormalWord, lead: NormalWord, p: int) -> bool:
    """Do the internal link labels of ``lead`` match ``w`` at position p?"""
    return all(w.links[p + r][1] == lead.links[r][1] for r in range(lead.length - 1))


class RewriteSystem:
    """A sequence of monic nonzero relation polynomials plus cached leading data."""

    def __init__(self, engine: Engine, elements=()):
        self.engine = engine
        self.sig = engine.sig
        self.elements: list[ConfPoly] = []
        self.leading: list[NormalWord] = []
        self.dfree: list[bool] = []
        self._lead_gens: list[tuple[int, ...]] = []
        for p in elements:
            self._append(p)

    def __len__(self) -> int:
        return len(self.elements)

    def _append(self, p: ConfPoly) -> int:
        assert not p.is_zero(), "rewriting systems hold nonzero polynomials only"
        p = p.monic()
        self.elements.append(p)
        lead = p.leading_word()
        self.leading.append(lead)
        self.dfree.append(p.is_dfree())
        self._lead_gens.append(lead.gens())
        return len(self.elements) - 1

    # -- occurrence matching ------------------------------------------------

    def find_occurrences(self, w: NormalWord, exclude: frozenset[int] = frozenset()) -> list[Occurrence]:
        """All pattern matches in ``w``, ordered by (position, kind, element)."""
        out = []
        wg = w.gens()
        nlinks = len(w.links)
        for e in range(len(self.elements)):
            if e in exclude:
                continue
            lead = self.leading[e]
            lg = self._lead_gens[e]
            L = lead.length
            if self.dfree[e]:
                # interior matches: the element must be D-free end to end, and
                # a link must follow the matched segment
                for p in range(nlinks - L + 1):
                    if wg[p:p + L] == lg and _labels_match(w, lead, p):
                        out.append(Occurrence(e, p, False))
            p = w.length - L
            if p >= 0 and wg[p:] == lg and _labels_match(w, lead, p):
                dshift = tuple(a - b for a, b in zip(w.taild, lead.taild))
                if all(c >= 0 for c in dshift):
                    out.append(Occurrence(e, p, True, dshift))
        out.sort(key=lambda o: (o.pos, o.second, o.elem))
        return out

    def build_sword(self, w: NormalWord, occ: Occurrence) -> ConfPoly:
        """Engine-normalize the S-word that eliminates ``w`` via ``occ``.

        The result's leading term is exactly (w, 1); anything else would
        break the well-order descent of reduction, so it is asserted.
        """
        eng = self.engine
        poly = self.elements[occ.elem]
        if occ.second:
            core = eng.derive_multi(occ.dshift, poly)
        else:
            lead = self.leading[occ.elem]
            j = occ.pos + lead.length - 1
            mprime = w.links[j][1]
            v = NormalWord(w.links[j + 1:], w.tail, w.taild)
            core = eng.mul_poly(poly, mprime, ConfPoly.from_word(v))
        for gen, m in reversed(w.links[:occ.pos]):
            core = eng.mul_prefix_poly(gen, m, core)
        lw, lc = core.leading_term()
        assert lw == w and lc == 1, ("leading-word law violated", w, occ, lw, lc)
        return core

    # -- reduction ----------------------------------------------------------

    def reduce(self, p: ConfPoly, exclude: frozenset[int] = frozenset(), rng=None):
        """Eliminate occurrences until none remain; return (remainder, trace).

        Targets the greatest reducible word each round and its first
        occurrence (leftmost position); pass ``rng`` to randomize the
        choice among a word's occurrences instead.
        """
        remainder = p
        steps = []
        irreducible: set[NormalWord] = set()
        while True:
            picked = None
            for w in sorted(remainder.terms, key=NormalWord.weight_key, reverse=True):
                if w in irreducible:
                    continue
                occs = self.find_occurrences(w, exclude)
                if occs:
                    picked = (w, occs)
                    break
                irreducible.add(w)
            if picked is None:
                return remainder, ReductionTrace(tuple(steps))
            w, occs = picked
            occ = occs[0] if rng is None else occs[rng.randrange(len(occs))]
            coeff = remainder.coeff(w)
            sword = self.build_sword(w, occ)
            remainder = remainder.add_scaled(sword, -coeff)
            steps.append(TraceStep(w, occ, coeff))

    # -- composition generation ----------------------------------------------

    def overlap_tasks(self, i: int, j: int) -> list[CompositionTask]:
        """Inclusion, right-inclusion, and intersection tasks for the ordered pair."""
        fi, gj = self.leading[i], self.leading[j]
        fig, gjg = self._lead_gens[i], self._lead_gens[j]
        lf, lg = fi.length, gj.length
        tasks = []
        # the j-pattern strictly inside the i-leading word, a link following it
        if self.dfree[j]:
            for p in range(len(fi.links) - lg + 1):
                if fig[p:p + lg] == gjg and _labels_match(fi, gj, p):
                    tasks.append(CompositionTask(INCLUSION, i, j, w=fi, pos=p))
        # the j-pattern aligned with the i-suffix, tail derivations split minimally
        p = lf - lg
        if (p >= 0 and fig[p:] == gjg and _labels_match(fi, gj, p)
                and not (i == j and p == 0)):
            alpha = index_pos_part(gj.taild, fi.taild)
            beta = index_pos_part(fi.taild, gj.taild)
            w = NormalWord(fi.links, fi.tail, index_add(fi.taild, alpha))
            tasks.append(CompositionTask(RIGHT_INCLUSION, i, j, w=w, pos=p,
                                         alpha=alpha, beta=beta))
        # proper overlap of the i-suffix with the j-prefix
        if self.dfree[i]:
            for c in range(1, min(lf, lg)):
                p = lf - c
                if fig[p:] == gjg[:c] and all(
                        fi.links[p + r][1] == gj.links[r][1] for r in range(c - 1)):
                    w = NormalWord(fi.links + gj.links[c - 1:], gj.tail, gj.taild)
                    tasks.append(CompositionTask(INTERSECTION, i, j, w=w, pos=p, c=c))
        return tasks

    def multiplication_bounds(self, p: ConfPoly) -> MultiIndex:
        """Per-coordinate label bound M: products with any m_t >= M_t vanish.

        Conservation of the per-coordinate grading forces any product
        a<m>p or p<m>a to zero once m_t exceeds what the output length can
        carry, so only labels inside the box [0, M) need checking.
        """
        sig = self.sig
        deg = p.degree()
        words = list(p.terms)
        out = []
        for t in range(sig.n):
            max_taild = max(w.taild[t] for w in words)
            min_link = min(w.link_sum(t) for w in words)
            bound = deg * (sig.locality[t] - 1) + max_taild + 1 - min_link
            out.append(max(sig.locality[t], bound))
        return tuple(out)

    def _check_bound_boundary(self, p: ConfPoly, bounds: MultiIndex) -> None:
        for t in range(self.sig.n):
            corner = tuple(bounds[r] if r == t else max(bounds[r] - 1, 0)
                           for r in range(self.sig.n))
            for g in range(len(self.sig.generators)):
                left = self.engine.mul_prefix_poly(g, corner, p)
                assert left.is_zero(), ("bound boundary (left)", corner, t)
                unit = ConfPoly.from_word(single_word(g, self.sig.n))
                right = self.engine.mul_poly(p, corner, unit)
                assert right.is_zero(), ("bound boundary (right)", corner, t)

    def multiplication_tasks(self, i: int) -> list[CompositionTask]:
        """Left products a<m>f for invalid m, and right products f<m>a for
        non-D-free f, over the finite label box of the element."""
        sig = self.sig
        p = self.elements[i]
        bounds = self.multiplication_bounds(p)
        if self.engine.check:
            self._check_bound_boundary(p, bounds)
        lead = self.leading[i]
        tasks = []
        for m in iter_box(bounds):
            valid = sig.is_valid(m)
            for g in range(len(sig.generators)):
                if not valid:
                    w = NormalWord(((g, m),) + lead.links, lead.tail, lead.taild)
                    tasks.append(CompositionTask(LEFT_MUL, i, g, w=w, m=m))
                if not self.dfree[i]:
                    w = NormalWord(lead.links + ((lead.tail, m),), g, lead.taild)
                    tasks.append(CompositionTask(RIGHT_MUL, i, g, w=w, m=m))
        return tasks

    def all_tasks(self) -> list[CompositionTask]:
        tasks = []
        for i in range(len(self)):
            for j in range(len(self)):
                tasks.extend(self.overlap_tasks(i, j))
        for i in range(len(self)):
            tasks.extend(self.multiplication_tasks(i))
        return tasks

    # -- composition evaluation ----------------------------------------------

    def eval_composition(self, task: CompositionTask) -> ConfPoly:
        """The composition polynomial of a task, engine-normalized.

        For overlap kinds the two eliminations of the ambient word cancel
        its leading term, so the result sits strictly below task.w.
        """
        eng = self.engine
        n = self.sig.n
        if task.kind == LEFT_MUL:
            return eng.mul_prefix_poly(task.j, task.m, self.elements[task.i])
        if task.kind == RIGHT_MUL:
            unit = ConfPoly.from_word(single_word(task.j, n))
            return eng.mul_poly(self.elements[task.i], task.m, unit)
        if task.kind == INCLUSION:
            out = self.elements[task.i] - self.build_sword(
                task.w, Occurrence(task.j, task.pos, False))
        elif task.kind == RIGHT_INCLUSION:
            lhs = eng.derive_multi(task.alpha, self.elements[task.i])
            assert lhs.leading_term() == (task.w, 1), task
            rhs = self.build_sword(task.w, Occurrence(task.j, task.pos, True, task.beta))
            out = lhs - rhs
        else:
            assert task.kind == INTERSECTION, task.kind
            lhs = self.build_sword(task.w, Occurrence(task.i, 0, False))
            rhs = self.build_sword(task.w, Occurrence(task.j, task.pos, True, zero_index(n)))
            out = lhs - rhs
        assert out.is_zero() or compare_words(out.leading_word(), task.w) < 0, task
        return out

    def is_trivial(self, task: CompositionTask) -> bool:
        remainder, _ = self.reduce(self.eval_composition(task))
        return remainder.is_zero()

    def check_gsb(self) -> GSBReport:
        """Reduce every composition; empty failures mean the system is a basis."""
        failures = []
        for task in self.all_tasks():
            remainder, _ = self.reduce(self.eval_composition(task))
            if not remainder.is_zero():
                failures.append((task, remainder))
        return GSBReport(tuple(failures), has_non_dfree=not all(self.dfree))

    # -- derived operations ----------------------------------------------------

    def interreduce(self) -> "RewriteSystem":
        """Reduce each element against the others until nothing changes."""
        elems = list(self.elements)
        changed = True
        while changed:
            changed = False
            for i in range(len(elems)):
                others = RewriteSystem(self.engine, elems[:i] + elems[i + 1:])
                r, _ = others.reduce(elems[i])
                if r.is_zero():
                    del elems[i]
                    changed = True
                    break
                r = r.monic()
                if r != elems[i]:
                    elems[i] = r
                    changed = True
                    break
        return RewriteSystem(self.engine, elems)

    def irreducible_words(self, max_length: int, max_taild: MultiIndex | None = None) -> list[NormalWord]:
        """All normal words within the bounds with no occurrence, ascending."""
        sig = self.sig
        if max_taild is None:
            max_taild = zero_index(sig.n)
        tailds = list(iter_box(tuple(b + 1 for b in max_taild)))
        valid_labels = list(iter_box(sig.locality))
        ngens = len(sig.generators)
        out = []
        for length in range(1, max_length + 1):
            for gens in product(range(ngens), repeat=length):
                for labels in product(valid_labels, repeat=length - 1):
                    links = tuple(zip(gens[:-1], labels))
                    for taild in tailds:
                        w = NormalWord(links, gens[-1], taild)
                        if not self.find_occurrences(w):
                            out.append(w)
        out.sort(key=NormalWord.weight_key)
        return out

    def ideal_membership(self, p: ConfPoly) -> bool:
        """Decide membership in the ideal; exact only after completion."""
        remainder, _ = self.reduce(p)
        return remainder.is_zero()


def complete(engine: Engine, elements, *, max_degree: int | None = None,
             max_elements: int | None = None, max_steps: int | None = None):
    """Saturate the system until every composition reduces to zero.

    Returns (system, status) with status one of COMPLETE (queue exhausted),
    BOUNDED_COMPLETE (queue exhausted, but remainders above max_degree were
    discarded), or LIMIT_REACHED (max_elements or max_steps tripped).
    The output is interreduced; the run is deterministic.
    """
    for name, bound in (("max_degree", max_degree),
                        ("max_elements", max_elements),
                        ("max_steps", max_steps)):
        assert bound is None or bound >= 1, f"{name} must be a positive integer"

    system = RewriteSystem(engine, elements).interreduce()
    heap: list = []
    seq = count()

    def push(task: CompositionTask) -> None:
        heapq.heappush(heap, (*task.sort_key(), next(seq), task))

    def push_for(k: int) -> None:
        for i in range(k):
            for task in system.overlap_tasks(i, k):
                push(task)
            for task in system.overlap_tasks(k, i):
                push(task)
        for task in system.overlap_tasks(k, k):
            push(task)
        for task in system.multiplication_tasks(k):
            push(task)

    for k in range(len(system)):
        push_for(k)

    steps = 0
    discarded = False
    status = COMPLETE
    while heap:
        if max_steps is not None and steps >= max_steps:
            status = LIMIT_REACHED
            break
        entry = heapq.heappop(heap)
        task = entry[-1]
        steps += 1
        remainder, _ = system.reduce(system.eval_composition(task))
        if remainder.is_zero():
            continue
        if max_degree is not None and remainder.degree() > max_degree:
            discarded = True
            continue
        if max_elements is not None and len(system) >= max_elements:
            status = LIMIT_REACHED
            break
        push_for(system._append(remainder))
    if status == COMPLETE and discarded:
        status = BOUNDED_COMPLETE
    return system.interreduce(), status
