import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renewal_arma.errors import FactorizationError
from renewal_arma.polynomials import (
    Poly,
    SymLaurent,
    deflate_at_one,
    divide_sym_by_unit_pair,
    factor_outside,
    resultant,
    roots,
    sym_product_diff,
)


def expand_from_roots(rts):
    """Monic polynomial with the given roots, by convolution."""
    coeffs = np.array([1.0 + 0.0j])
    for r in rts:
        coeffs = np.convolve(coeffs, [-r, 1.0])
    assert np.max(np.abs(coeffs.imag)) < 1e-12 * max(1.0, np.max(np.abs(coeffs)))
    return Poly(tuple(coeffs.real))


def well_separated(rts, gap=0.05):
    return all(abs(a - b) > gap for i, a in enumerate(rts) for b in rts[i + 1 :])


def sorted_roots(rts):
    return sorted(rts, key=lambda z: (round(z.real, 6), round(z.imag, 6)))


class TestEval:
    def test_root_of_linear(self):
        assert Poly((1.0, -1.0))(1.0) == 0.0

    def test_constant(self):
        assert Poly((1.0,))(1j) == 1.0

    def test_linear_at_two(self):
        assert Poly((1.0, -0.5))(2.0) == 0.0

    def test_zero_poly(self):
        assert Poly(())(3.7) == 0.0

    def test_trim_keeps_leading(self):
        p = Poly((0.0, 0.5, 0.0))
        assert p.coeffs == (0.0, 0.5)
        assert p.degree == 1


class TestRoots:
    def test_linear(self):
        assert roots(Poly((1.0, -1.0))) == [pytest.approx(1.0)]

    def test_quadratic_sym(self):
        got = sorted_roots(roots(Poly((1.0, 0.0, -0.25))))
        assert got[0] == pytest.approx(-2.0)
        assert got[1] == pytest.approx(2.0)

    def test_degree5_known_roots(self):
        want = [-2.0, 2.0, 3.0, 1.5 + 0.5j, 1.5 - 0.5j]
        got = sorted_roots(roots(expand_from_roots(want)))
        for g, w in zip(got, sorted_roots(want)):
            assert abs(g - w) < 1e-9

    def test_constant_rejected(self):
        with pytest.raises(ValueError, match="constant"):
            roots(Poly((2.0,)))

    def test_conjugates_exact(self):
        p = expand_from_roots([1.2 + 3.4j, 1.2 - 3.4j, -5.0, 2.2 + 0.1j, 2.2 - 0.1j])
        got = roots(p)
        complexes = [z for z in got if z.imag != 0.0]
        for z in complexes:
            assert z.conjugate() in complexes

    @given(
        st.lists(st.floats(1.1, 10.0), min_size=0, max_size=4),
        st.lists(st.tuples(st.floats(1.1, 8.0), st.floats(0.2, 6.0)), min_size=0, max_size=2),
        st.data(),
    )
    @settings(max_examples=60, deadline=None)
    def test_roundtrip_random(self, real_mods, complex_parts, data):
        rts = []
        for m in real_mods:
            rts.append(m if data.draw(st.booleans()) else -m)
        for re, im in complex_parts:
            rts.extend([complex(re, im), complex(re, -im)])
        if not rts or not well_separated(rts):
            return
        got = sorted_roots(roots(expand_from_roots(rts)))
        for g, w in zip(got, sorted_roots(rts)):
            assert abs(g - complex(w)) < 1e-9


class TestDeflateAtOne:
    def test_linear(self):
        assert deflate_at_one(Poly((1.0, -1.0))).coeffs == (1.0,)

    def test_two_factors(self):
        got = deflate_at_one(Poly((1.0, -1.8, 0.8)))
        assert got.coeffs == pytest.approx((1.0, -0.8))

    def test_p2_example(self):
        # den - num for head (0.2, 0.3), r = 0.6
        got = deflate_at_one(Poly((1.0, -0.8, -0.18, -0.02)))
        assert got.coeffs == pytest.approx((1.0, 0.2, 0.02), abs=1e-15)

    def test_no_zero_at_one(self):
        with pytest.raises(FactorizationError, match="z=1"):
            deflate_at_one(Poly((1.0, -0.5)))

    @given(st.lists(st.floats(-2.0, 2.0), min_size=1, max_size=7))
    @settings(max_examples=80, deadline=None)
    def test_multiply_back(self, qc):
        q = Poly(tuple(qc))
        if q.degree < 0:
            return
        p = Poly((1.0, -1.0)) * q
        back = deflate_at_one(p)
        diff = back - q
        assert all(abs(c) < 1e-12 for c in diff.coeffs)


class TestSymProductDiff:
    def test_geometric(self):
        got = sym_product_diff(Poly((0.0, 0.5)), Poly((1.0, -0.5)))
        assert got.c == pytest.approx((1.0, -0.5))

    def test_trivial(self):
        assert sym_product_diff(Poly((0.0,)), Poly((1.0,))).c == (1.0,)

    def test_identical_cancel(self):
        p = Poly((0.3, -0.2, 0.7))
        assert sym_product_diff(p, p).c == ()

    @given(
        st.lists(st.floats(-1.5, 1.5), min_size=1, max_size=7),
        st.lists(st.floats(-1.5, 1.5), min_size=1, max_size=7),
        st.floats(0.01, 2 * math.pi - 0.01),
    )
    @settings(max_examples=80, deadline=None)
    def test_circle_identity(self, pc, qc, t):
        P, Q = Poly(tuple(pc)), Poly(tuple(qc))
        z = complex(math.cos(t), math.sin(t))
        want = abs(Q(z)) ** 2 - abs(P(z)) ** 2
        got = sym_product_diff(P, Q)(z)
        assert abs(got - want) < 1e-12
        assert abs(got.imag) < 1e-12


class TestDivideSymByUnitPair:
    def test_unit_pair_itself(self):
        assert divide_sym_by_unit_pair(SymLaurent((2.0, -1.0))).c == (1.0,)

    def test_geometric(self):
        assert divide_sym_by_unit_pair(SymLaurent((1.0, -0.5))).c == pytest.approx((0.5,))

    def test_degree_two(self):
        # (2 - z - 1/z) * (2 - (z + 1/z)) expanded is 6 - 4(z + 1/z) + (z^2 + 1/z^2)
        got = divide_sym_by_unit_pair(SymLaurent((6.0, -4.0, 1.0)))
        assert got.c == pytest.approx((2.0, -1.0))

    def test_missing_factor(self):
        with pytest.raises(FactorizationError, match="factor"):
            divide_sym_by_unit_pair(SymLaurent((1.0, -0.2)))

    @given(st.lists(st.floats(-2.0, 2.0), min_size=1, max_size=5))
    @settings(max_examples=80, deadline=None)
    def test_multiply_back(self, dc):
        d = SymLaurent(tuple(dc))
        if not d.c:
            return
        # n = (2 - z - 1/z) * d, assembled coefficient-wise
        n = [2.0 * d.c[0] - 2.0 * (d.c[1] if d.degree >= 1 else 0.0)]
        for h in range(1, d.degree + 2):
            lo = d.c[h - 1] if h - 1 <= d.degree else 0.0
            mid = d.c[h] if h <= d.degree else 0.0
            hi = d.c[h + 1] if h + 1 <= d.degree else 0.0
            n.append(2.0 * mid - lo - hi)
        got = divide_sym_by_unit_pair(SymLaurent(tuple(n)))
        scale = max(abs(c) for c in d.c)
        assert got.degree == d.degree
        for a, b in zip(got.c, d.c):
            assert abs(a - b) < 1e-11 * max(scale, 1.0)


class TestFactorOutside:
    def test_constant(self):
        theta, k = factor_outside(SymLaurent((0.5,)))
        assert theta.coeffs == (1.0,)
        assert k == 0.5

    def test_degree_one(self):
        theta, k = factor_outside(SymLaurent((2.5, 1.0)))
        assert theta.coeffs == pytest.approx((1.0, 0.5))
        assert k == pytest.approx(2.0)

    def test_p2_example_ma_coefficient(self):
        # spectral numerator of the running two-term example after removing
        # the unit pair: center 0.6476, side 0.004
        theta, k = factor_outside(SymLaurent((0.6476, 0.004)))
        side, center = 0.004, 0.6476
        a1 = (-center - math.sqrt(center ** 2 - 4 * side ** 2)) / (2 * side)
        assert theta.coeffs[1] == pytest.approx(-1.0 / a1, rel=1e-12)
        assert theta.coeffs[1] == pytest.approx(6.18e-3, rel=1e-2)

    def test_circle_zero_rejected(self):
        # double zero on the circle at an off-grid angle (1 radian): the
        # density stays nonnegative, so the root-modulus check must fire
        c = math.cos(1.0)
        with pytest.raises(FactorizationError, match="unit circle"):
            factor_outside(SymLaurent((4 * c * c + 2, -4 * c, 1.0)))

    def test_sign_change_on_circle_rejected(self):
        # 2 + z + 1/z touches zero at z = -1, which sits on the sample grid
        with pytest.raises(FactorizationError, match="spectral density"):
            factor_outside(SymLaurent((2.0, 1.0)))

    def test_negative_density_rejected(self):
        with pytest.raises(FactorizationError, match="spectral density"):
            factor_outside(SymLaurent((-1.0,)))

    @given(
        st.lists(st.floats(1.3, 6.0), min_size=0, max_size=2),
        st.lists(st.tuples(st.floats(1.3, 5.0), st.floats(0.3, 4.0)), min_size=0, max_size=2),
        st.floats(0.1, 4.0),
        st.data(),
    )
    @settings(max_examples=60, deadline=None)
    def test_reconstruction_on_circle(self, real_mods, complex_parts, k_in, data):
        rts = [m if data.draw(st.booleans()) else -m for m in real_mods]
        for re, im in complex_parts:
            rts.extend([complex(re, im), complex(re, -im)])
        if not rts or not well_separated(rts):
            return
        theta_in = np.array([1.0 + 0.0j])
        for a in rts:
            theta_in = np.convolve(theta_in, [1.0, -1.0 / a])
        theta_in = Poly(tuple(theta_in.real))
        q = theta_in.degree
        # d = k * theta(z) theta(1/z): coefficient h is k * sum_j c_j c_{j+h}
        c = theta_in.coeffs
        d = SymLaurent(tuple(
            k_in * sum(c[j] * c[j + h] for j in range(len(c) - h)) for h in range(q + 1)
        ))
        theta, k = factor_outside(d)
        assert all(abs(z) > 1.0 + 1e-8 for z in roots(theta))
        grid = np.exp(2j * np.pi * np.arange(1, 64) / 64)
        for z in grid:
            target = d(z)
            got = k * theta(z) * theta(1.0 / z)
            assert abs(got - target) / abs(target) < 1e-9


class TestResultant:
    def test_shared_root_is_zero(self):
        p = Poly((1.0, -1.0))  # root 1
        q = Poly((2.0, -2.0))  # root 1
        assert abs(resultant(p, q)) < 1e-12

    def test_coprime_nonzero(self):
        assert abs(resultant(Poly((1.0, -0.5)), Poly((1.0, -0.25)))) > 1e-3

    def test_constant_cases(self):
        assert resultant(Poly((3.0,)), Poly((1.0, 2.0))) == 3.0
        assert resultant(Poly((1.0, 2.0)), Poly((3.0,))) == 3.0
