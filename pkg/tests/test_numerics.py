"""Tests for the numerics module.

Expected values are produced by small independent oracles defined here
(bisection on exact signs, cofactor determinants, convolution products),
never by the code paths under test.
"""

import math
import random
from fractions import Fraction

import pytest

from algbilliards.numerics import (
    BigIntMatrix,
    ComplexPoly,
    IntPoly,
    NoSignChangeError,
    NotARootError,
    bracketed_largest_root,
    char_poly,
    deflate_root,
    exact_det,
    exact_poly_divide,
    exact_rank,
    find_roots,
)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


def bisect_sign_change(coeffs, lo, hi, tol=1e-13):
    """Sign-change bisection on an integer polynomial, independent of IntPoly."""

    def val(x):
        acc = Fraction(0)
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    a, b = Fraction(lo), Fraction(hi)
    sa = val(a)
    assert sa * val(b) < 0
    while float(b - a) > tol:
        mid = (a + b) / 2
        vm = val(mid)
        if vm == 0:
            return float(mid)
        if (vm > 0) == (sa > 0):
            a = mid
        else:
            b = mid
    return float((a + b) / 2)


def cofactor_det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        total += (-1) ** j * rows[0][j] * cofactor_det(minor)
    return total


def convolve(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


# ---------------------------------------------------------------------------
# find_roots
# ---------------------------------------------------------------------------


def test_find_roots_quadratic():
    roots = find_roots(ComplexPoly([-1, 0, 1]))  # t^2 - 1
    assert [r.multiplicity for r in roots] == [1, 1]
    values = sorted(r.value.real for r in roots)
    assert abs(values[0] + 1) < 1e-12 and abs(values[1] - 1) < 1e-12
    assert all(r.residual < 1e-8 for r in roots)


def test_find_roots_triple_root():
    # (t - 2)^3 expanded
    roots = find_roots(ComplexPoly([-8, 12, -6, 1]))
    assert len(roots) == 1
    assert roots[0].multiplicity == 3
    assert abs(roots[0].value - 2) < 1e-4
    assert roots[0].residual < 1e-8


def test_find_roots_phi3_largest_root_bracket():
    # largest root of t^3 - 12 t^2 + 9 t - 2, located by the bisection oracle
    oracle = bisect_sign_change([-2, 9, -12, 1], 11, 12)
    assert 11.21 < oracle < 11.22
    roots = find_roots(ComplexPoly([-2, 9, -12, 1]))
    largest = max(roots, key=lambda r: r.value.real)
    assert abs(largest.value - oracle) < 1e-9
    assert 11.21 < largest.value.real < 11.22


def test_find_roots_multiplicities_cover_degree_random():
    rng = random.Random(7)
    for _ in range(25):
        simple = [complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(3)]
        double = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        coeffs = [1]
        for r in simple + [double, double]:
            coeffs = convolve(coeffs, [-r, 1])
        clusters = find_roots(ComplexPoly(coeffs))
        assert sum(c.multiplicity for c in clusters) == 5
        for r in simple:
            assert min(abs(c.value - r) for c in clusters) < 1e-7
        near_double = min(clusters, key=lambda c: abs(c.value - double))
        assert abs(near_double.value - double) < 1e-6


def test_find_roots_rejects_constant():
    with pytest.raises(ValueError):
        find_roots(ComplexPoly([3.0]))


# ---------------------------------------------------------------------------
# deflate_root
# ---------------------------------------------------------------------------


def test_deflate_simple():
    q = deflate_root(ComplexPoly([-1, 0, 1]), 1.0, 1)
    assert q.degree == 1
    assert abs(q.coeffs[0] - 1) < 1e-12 and abs(q.coeffs[1] - 1) < 1e-12


def test_deflate_double_zero():
    q = deflate_root(ComplexPoly([0, 0, 0, 1]), 0.0, 2)  # t^3 / t^2
    assert q.degree == 1
    assert abs(q.coeffs[0]) < 1e-12 and abs(q.coeffs[1] - 1) < 1e-12


def test_deflate_ellipse_secant_polynomial():
    # restriction of x^2/4 + y^2 - 1 to the line (2 - t/sqrt2, t/sqrt2):
    # (5/8) t^2 - (sqrt2/2) t, with base root t = 0
    s2 = math.sqrt(2)
    p = ComplexPoly([0, -s2 / 2, 5 / 8])
    q = deflate_root(p, 0.0, 1)
    root = -q.coeffs[0] / q.coeffs[1]
    assert abs(root - 4 * s2 / 5) < 1e-12


def test_deflate_not_a_root():
    with pytest.raises(NotARootError):
        deflate_root(ComplexPoly([-1, 0, 1]), 0.5, 1)


def test_deflate_multiply_back_roundtrip():
    rng = random.Random(3)
    for _ in range(20):
        coeffs = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(5)]
        coeffs.append(1.0 + 0j)
        p = ComplexPoly(coeffs)
        r = find_roots(p)[0].value
        q = deflate_root(p, r, 1)
        back = convolve(list(q.coeffs), [-r, 1])
        scale = max(abs(c) for c in coeffs)
        assert max(abs(a - b) for a, b in zip(back, coeffs)) < 1e-9 * scale


# ---------------------------------------------------------------------------
# char_poly
# ---------------------------------------------------------------------------


def test_char_poly_identity():
    m = BigIntMatrix.identity(2)
    assert char_poly(m).coeffs == (1, -2, 1)


def test_char_poly_matches_cofactor_det_at_zero():
    rng = random.Random(11)
    for _ in range(10):
        rows = [[rng.randrange(-9, 10) for _ in range(5)] for _ in range(5)]
        m = BigIntMatrix.from_rows(rows)
        cp = char_poly(m)
        # char poly at 0 is (-1)^n det(M)
        assert cp(0) == (-1) ** 5 * cofactor_det(rows)
        assert cp.coeffs[-1] == 1


def test_char_poly_crt_path_agrees_with_faddeev():
    rng = random.Random(5)
    n = 30  # above the small-matrix cutoff
    rows = [[rng.randrange(-4, 5) for _ in range(n)] for _ in range(n)]
    m = BigIntMatrix.from_rows(rows)
    from algbilliards.numerics import _char_poly_crt, _char_poly_faddeev

    assert _char_poly_crt(m).coeffs == _char_poly_faddeev(m).coeffs


def test_exact_det_and_rank():
    m = BigIntMatrix.from_rows([[2, 4], [1, 2]])
    assert exact_det(m) == 0
    assert exact_rank(m) == 1
    m2 = BigIntMatrix.from_rows([[1, 2, 3], [4, 5, 6], [7, 8, 10]])
    assert exact_det(m2) == cofactor_det([[1, 2, 3], [4, 5, 6], [7, 8, 10]])
    assert exact_rank(m2) == 3


# ---------------------------------------------------------------------------
# exact_poly_divide
# ---------------------------------------------------------------------------


def test_exact_divide_basic():
    q, r = exact_poly_divide(IntPoly([-1, 0, 1]), IntPoly([-1, 1]))
    assert q.coeffs == (1, 1) and r.is_zero()


def test_exact_divide_power():
    cube = IntPoly(convolve(convolve([-1, 1], [-1, 1]), [-1, 1]))
    q, r = exact_poly_divide(cube, IntPoly([-1, 1]))
    assert q.coeffs == tuple(convolve([-1, 1], [-1, 1])) and r.is_zero()


def test_exact_divide_with_remainder():
    q, r = exact_poly_divide(IntPoly([1, 0, 1]), IntPoly([-1, 1]))
    assert not r.is_zero()
    recomposed = IntPoly(convolve(list(q.coeffs), [-1, 1])) + r
    assert recomposed.coeffs == (1, 0, 1)


# ---------------------------------------------------------------------------
# bracketed_largest_root
# ---------------------------------------------------------------------------


def test_bracketed_root_triple_at_one():
    # (x - 1)^3 expanded has its only root at exactly 1
    r = bracketed_largest_root(IntPoly([-1, 3, -3, 1]), Fraction(1, 2), Fraction(3, 2))
    assert abs(r - 1.0) < 1e-12


def test_bracketed_root_phi3():
    oracle = bisect_sign_change([-2, 9, -12, 1], 10, 12)
    r = bracketed_largest_root(IntPoly([-2, 9, -12, 1]), 10, 12)
    assert abs(r - oracle) < 1e-12
    p = IntPoly([-2, 9, -12, 1])
    dp = p.derivative()
    assert abs(float(p.eval_fraction(Fraction(r)))) / abs(
        float(dp.eval_fraction(Fraction(r)))
    ) < 1e-10


def test_bracketed_root_phi4_interval():
    # x^3 - 25 x^2 + 19 x - 3 on (23, 25)
    r = bracketed_largest_root(IntPoly([-3, 19, -25, 1]), 23, 25)
    assert 23 < r < 25


def test_bracketed_root_rejects_bad_bracket():
    with pytest.raises(NoSignChangeError):
        bracketed_largest_root(IntPoly([-2, 9, -12, 1]), 20, 30)


def test_bracketed_root_rejects_multiple_roots():
    # (x-1)(x-2) has two roots in (0, 3)
    with pytest.raises(ValueError):
        bracketed_largest_root(IntPoly([2, -3, 1]), 0, 3)


# ---------------------------------------------------------------------------
# IntPoly algebra
# ---------------------------------------------------------------------------


def test_intpoly_product_matches_convolution_oracle():
    rng = random.Random(19)
    for _ in range(20):
        a = [rng.randrange(-5, 6) for _ in range(4)]
        b = [rng.randrange(-5, 6) for _ in range(5)]
        if all(v == 0 for v in a):
            a[0] = 1
        if all(v == 0 for v in b):
            b[0] = 1
        assert (IntPoly(a) * IntPoly(b)).coeffs == IntPoly(convolve(a, b)).coeffs


def test_intpoly_pow():
    assert (IntPoly([1, 1]) ** 6).coeffs == (1, 6, 15, 20, 15, 6, 1)
