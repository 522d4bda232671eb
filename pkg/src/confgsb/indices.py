"""Exact arithmetic on multi-indices.

A multi-index is a tuple of n nonnegative integers.  Everything downstream
(word labels, derivation exponents, locality bounds) is built on these, so the
helpers here are deliberately small and total: componentwise binomials, signs,
falling factorials, and validity against a locality bound.  All arithmetic is
arbitrary-precision by construction (Python ints).
"""

from __future__ import annotations

import math
from itertools import product

MultiIndex = tuple[int, ...]


def binom_multi(m: MultiIndex, s: MultiIndex) -> int:
    """Product of componentwise binomial coefficients C(m_t, s_t).

    Zero as soon as any s_t > m_t, which is what cuts every infinite sum in
    the multiplication formulas down to finitely many terms.
    """
    out = 1
    for mt, st in zip(m, s, strict=True):
        if st > mt:
            return 0
        out *= math.comb(mt, st)
    return out


def falling_factorial(m: int, i: int) -> int:
    """m(m-1)...(m-i+1); 1 when i == 0, and 0 whenever 0 <= m < i."""
    assert i >= 0, i
    out = 1
    for k in range(i):
        out *= m - k
    return out


def sign_of(s: MultiIndex) -> int:
    """(-1) to the total degree of s."""
    return -1 if sum(s) % 2 else 1


def is_valid_index(m: MultiIndex, bound: MultiIndex) -> bool:
    """True iff m_t < bound_t for every coordinate (strict in all of them).

    This is the condition for a product label to survive locality; a word may
    carry the label m exactly when this holds.
    """
    return all(0 <= mt < nt for mt, nt in zip(m, bound, strict=True))


def index_add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def index_sub(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    """Componentwise difference; asserts the result stays nonnegative.

    Negative labels/exponents never arise in the normalization formulas
    (binomial supports and falling-factorial zeros cut those branches first),
    so a negative here is always a bug upstream.
    """
    out = tuple(x - y for x, y in zip(a, b, strict=True))
    assert all(c >= 0 for c in out), (a, b)
    return out


def index_pos_part(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    """Componentwise max(a - b, 0)."""
    return tuple(max(x - y, 0) for x, y in zip(a, b, strict=True))


def unit_index(n: int, t: int) -> MultiIndex:
    """The t-th coordinate vector e_t of length n."""
    return tuple(1 if k == t else 0 for k in range(n))


def zero_index(n: int) -> MultiIndex:
    return (0,) * n


def iter_box(bounds: MultiIndex):
    """All multi-indices m with 0 <= m_t < bounds_t, ascending lex order."""
    yield from product(*(range(b) for b in bounds))


def iter_below(m: MultiIndex):
    """All s with 0 <= s <= m componentwise (the support of C(m, s))."""
    yield from product(*(range(mt + 1) for mt in m))


def factorial_multi(s: MultiIndex) -> int:
    """s! = s_1! ... s_n!."""
    out = 1
    for st in s:
        out *= math.factorial(st)
    return out
