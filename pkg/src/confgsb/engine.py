"""Fast normalizer for free n-conformal algebra expressions.

Everything here reduces bracketed products of (possibly derived) generators
to the canonical right-normed basis: words with valid labels and a trailing
derivation exponent.  Unlike the reference evaluator in naive.py, the engine
uses closed forms — falling-factorial products for derived left operands and
a binomial "dodge" that trades an invalid label against the head pair of the
right operand — and memoizes every word-level result on immutable keys.

The three structural invariants (length preservation, grade conservation,
D-free closure) can be asserted on every single operation by constructing
the engine with check=True; invariant_checks counts how many audits ran.
"""

from __future__ import annotations

from fractions import Fraction

from .indices import (
    MultiIndex,
    binom_multi,
    falling_factorial,
    index_add,
    index_sub,
    iter_below,
    sign_of,
    unit_index,
)
from .words import (
    AlgebraSignature,
    ConfPoly,
    ExprTree,
    Leaf,
    LinComb,
    Node,
    NormalWord,
    check_word,
    prepend_link,
)


class Engine:
    """Normalization engine bound to one algebra signature.

    check=True audits every produced polynomial against the structural
    invariants (cheap, but hot-loop callers may want it off).
    cache=False disables memoization; results must be identical either way.
    """

    def __init__(self, sig: AlgebraSignature, *, check: bool = False, cache: bool = True):
        self.sig = sig
        self.check = check
        self.cache = cache
        self.invariant_checks = 0
        self._prefix_memo: dict = {}
        self._words_memo: dict = {}
        self._derive_memo: dict = {}

    # -- derivations ----------------------------------------------------

    def derive_word(self, t: int, w: NormalWord) -> ConfPoly:
        """D_t applied to one normal word, as a normal-form polynomial."""
        key = (t, w)
        hit = self._derive_memo.get(key)
        if hit is not None:
            return hit
        if w.length == 1:
            bumped = index_add(w.taild, unit_index(self.sig.n, t))
            out = ConfPoly.from_word(NormalWord((), w.tail, bumped))
        else:
            # Leibniz across the first link; the label absorbs one D
            (g, m), rest_links = w.links[0], w.links[1:]
            rest = NormalWord(rest_links, w.tail, w.taild)
            out = ConfPoly.zero()
            if m[t]:
                dropped = index_sub(m, unit_index(self.sig.n, t))
                out = ConfPoly.from_word(
                    NormalWord(((g, dropped),) + rest_links, w.tail, w.taild), -m[t]
                )
            inner = self.derive_word(t, rest)
            out = out + inner.map_words(
                lambda x: NormalWord(((g, m),) + x.links, x.tail, x.taild)
            )
        if self.check:
            grades = tuple(
                w.grade(r) - (1 if r == t else 0) for r in range(self.sig.n)
            )
            self._audit(out, w.length, grades, dfree=False)
        if self.cache:
            self._derive_memo[key] = out
        return out

    def derive(self, t: int, p: ConfPoly) -> ConfPoly:
        out = ConfPoly.zero()
        for w, c in p.terms.items():
            out = out.add_scaled(self.derive_word(t, w), c)
        return out

    def derive_multi(self, i: MultiIndex, p: ConfPoly) -> ConfPoly:
        for t, count in enumerate(i):
            for _ in range(count):
                p = self.derive(t, p)
        return p

    # -- products ---------------------------------------------------------

    def mul_prefix(self, gen: int, m: MultiIndex, w: NormalWord) -> ConfPoly:
        """Normal form of gen⟨m⟩[w] for a bare generator on the left."""
        key = (gen, m, w)
        hit = self._prefix_memo.get(key)
        if hit is not None:
            return hit
        sig = self.sig
        if sig.is_valid(m):
            out = ConfPoly.from_word(prepend_link(gen, m, w))
        elif w.length == 1:
            if w.is_dfree():
                out = ConfPoly.zero()  # two generators under an invalid label
            else:
                # move one derivation across the product:
                # g⟨m⟩(D_t y) = D_t(g⟨m⟩y) + m_t · g⟨m−e_t⟩y
                t = next(k for k, c in enumerate(w.taild) if c)
                e_t = unit_index(sig.n, t)
                y = NormalWord((), w.tail, index_sub(w.taild, e_t))
                out = self.derive(t, self.mul_prefix(gen, m, y))
                if m[t]:
                    out = out.add_scaled(
                        self.mul_prefix(gen, index_sub(m, e_t), y), m[t]
                    )
        else:
            # invalid label against a longer word: gen⟨m⟩(head generator)
            # vanishes, so the expansion of that zero product can be solved
            # for its s = 0 term — a dodge onto strictly smaller labels:
            # gen⟨m⟩w = −Σ_{s≠0} (−1)^|s| C(m,s) gen⟨m−s⟩(b⟨m′+s⟩v)
            (b, mp) = w.links[0]
            v = NormalWord(w.links[1:], w.tail, w.taild)
            out = ConfPoly.zero()
            for s in iter_below(m):
                if not any(s):
                    continue
                inner = self.mul_prefix(b, index_add(mp, s), v)
                if inner:
                    out = out.add_scaled(
                        self.mul_prefix_poly(gen, index_sub(m, s), inner),
                        -sign_of(s) * binom_multi(m, s),
                    )
        if self.check:
            grades = tuple(m[r] + w.grade(r) for r in range(self.sig.n))
            self._audit(out, 1 + w.length, grades, dfree=w.is_dfree())
        if self.cache:
            self._prefix_memo[key] = out
        return out

    def mul_prefix_poly(self, gen: int, m: MultiIndex, p: ConfPoly) -> ConfPoly:
        out = ConfPoly.zero()
        for w, c in p.terms.items():
            out = out.add_scaled(self.mul_prefix(gen, m, w), c)
        return out

    def mul_words(self, u: NormalWord, m: MultiIndex, v: NormalWord) -> ConfPoly:
        """Normal form of [u]⟨m⟩[v]."""
        key = (u, m, v)
        hit = self._words_memo.get(key)
        if hit is not None:
            return hit
        if u.length == 1:
            # (D^i b)⟨m⟩v = (−1)^|i| · ∏_t m_t(m_t−1)…(m_t−i_t+1) · b⟨m−i⟩v
            coeff = sign_of(u.taild)
            for mt, it in zip(m, u.taild):
                coeff *= falling_factorial(mt, it)
            if coeff:
                out = self.mul_prefix(u.tail, index_sub(m, u.taild), v) * coeff
            else:
                out = ConfPoly.zero()
        else:
            # peel the first link through the left-nested expansion:
            # (b⟨m1⟩u1)⟨m⟩v = Σ_s (−1)^|s| C(m1,s) b⟨m1−s⟩(u1⟨m+s⟩v)
            (b, m1) = u.links[0]
            u1 = NormalWord(u.links[1:], u.tail, u.taild)
            out = ConfPoly.zero()
            for s in iter_below(m1):
                inner = self.mul_words(u1, index_add(m, s), v)
                if inner:
                    out = out.add_scaled(
                        self.mul_prefix_poly(b, index_sub(m1, s), inner),
                        sign_of(s) * binom_multi(m1, s),
                    )
        if self.check:
            grades = tuple(
                u.grade(r) + m[r] + v.grade(r) for r in range(self.sig.n)
            )
            self._audit(out, u.length + v.length, grades,
                        dfree=u.is_dfree() and v.is_dfree())
        if self.cache:
            self._words_memo[key] = out
        return out

    def mul_poly(self, p: ConfPoly, m: MultiIndex, q: ConfPoly) -> ConfPoly:
        out = ConfPoly.zero()
        for u, cu in p.terms.items():
            for v, cv in q.terms.items():
                out = out.add_scaled(self.mul_words(u, m, v), cu * cv)
        return out

    # -- expression trees -------------------------------------------------

    def normalize_tree(self, tree: ExprTree) -> ConfPoly:
        if isinstance(tree, Leaf):
            assert 0 <= tree.gen < len(self.sig.generators), tree.gen
            assert len(tree.dexp) == self.sig.n, tree.dexp
            return ConfPoly.from_word(NormalWord((), tree.gen, tree.dexp))
        assert isinstance(tree, Node), tree
        left = self.normalize_tree(tree.left)
        right = self.normalize_tree(tree.right)
        return self.mul_poly(left, tree.label, right)

    def normalize(self, comb: LinComb) -> ConfPoly:
        out = ConfPoly.zero()
        for coeff, tree in comb:
            out = out.add_scaled(self.normalize_tree(tree), Fraction(coeff))
        return out

    # -- invariant auditing ------------------------------------------------

    def _audit(self, out: ConfPoly, length: int, grades: tuple[int, ...],
               dfree: bool) -> None:
        self.invariant_checks += 1
        for x in out.terms:
            check_word(self.sig, x)
            assert x.length == length, (x, length)
            for t in range(self.sig.n):
                assert x.grade(t) == grades[t], (x, t, grades)
            if dfree:
                assert x.is_dfree(), x
