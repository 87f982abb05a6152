"""Core truncated Laurent series arithmetic."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhabiro import (
    DegreeBound,
    DegreeBoundError,
    DeltaAtLeast,
    NotInvertibleError,
    QSeries,
    RemainderError,
    exact_div,
    series_invert_unit,
    series_sum_bounded,
)

exps = st.integers(min_value=-8, max_value=8)
coeffs = st.integers(min_value=-9, max_value=9)
terms = st.dictionaries(exps, coeffs, max_size=6)


def mk(d, prec=None):
    return QSeries.from_terms(d, prec)


class TestConstruction:
    def test_zero_one_monomial(self):
        assert QSeries.zero().is_zero
        assert QSeries.one().coeff(0) == 1
        m = QSeries.monomial(Fraction(3, 2), -4)
        assert m.coeff(Fraction(3, 2)) == -4
        assert m.scale == 2

    def test_exactness(self):
        assert mk({0: 1}).is_exact
        assert not mk({0: 1}, prec=5).is_exact
        assert mk({0: 1}, prec=5).prec_q == 5

    def test_json_roundtrip(self):
        s = mk({-2: 3, 0: -1, 5: 7}, prec=9)
        assert QSeries.from_json(s.to_json()) == s
        t = QSeries.monomial(Fraction(1, 2))
        assert QSeries.from_json(t.to_json()) == t

    def test_immutability(self):
        s = QSeries.one()
        with pytest.raises(AttributeError):
            s.offset = 3


class TestArithmetic:
    @given(terms, terms)
    @settings(max_examples=80, deadline=None)
    def test_add_commutes(self, a, b):
        assert mk(a) + mk(b) == mk(b) + mk(a)

    @given(terms, terms)
    @settings(max_examples=80, deadline=None)
    def test_mul_commutes(self, a, b):
        assert mk(a) * mk(b) == mk(b) * mk(a)

    @given(terms, terms, terms)
    @settings(max_examples=60, deadline=None)
    def test_mul_distributes(self, a, b, c):
        x, y, z = mk(a), mk(b), mk(c)
        assert x * (y + z) == x * y + x * z

    @given(terms, terms, terms)
    @settings(max_examples=40, deadline=None)
    def test_mul_associative(self, a, b, c):
        x, y, z = mk(a), mk(b), mk(c)
        assert (x * y) * z == x * (y * z)

    def test_oracle_product(self):
        # (1 - q)(1 + q + q^2) = 1 - q^3
        a = mk({0: 1, 1: -1})
        b = mk({0: 1, 1: 1, 2: 1})
        assert a * b == mk({0: 1, 3: -1})

    def test_large_product_kronecker_path(self):
        # forces the big-integer packing branch; compare against identity
        # (sum q^i)^2 has coefficients 1..n..1
        n = 90
        s = QSeries([1] * n, 0, 1)
        sq = s * s
        assert sq.coeff(0) == 1
        assert sq.coeff(n - 1) == n
        assert sq.coeff(2 * n - 2) == 1

    def test_mixed_scale(self):
        h = QSeries.monomial(Fraction(1, 2))
        assert h * h == QSeries.monomial(1)
        assert (h + h) == 2 * h

    def test_truncation_propagates(self):
        a = mk({0: 1, 1: 1}, prec=3)
        b = mk({2: 1})
        assert (a * b).prec_q == 5

    @given(terms)
    @settings(max_examples=60, deadline=None)
    def test_mirror_involution(self, a):
        s = mk(a)
        assert s.mirror().mirror() == s

    def test_subst_qpow(self):
        s = mk({-1: 2, 3: -5})
        assert s.subst_qpow(3) == mk({-3: 2, 9: -5})


class TestDelta:
    def test_exact_delta(self):
        assert mk({2: 1, 5: -1}).delta() == 2
        assert mk({-3: 4}).delta() == -3

    def test_zero_truncated_delta_is_bound(self):
        d = QSeries.zero(7).delta()
        assert isinstance(d, DeltaAtLeast)
        assert d.bound == 7

    def test_exact_zero_delta_inf(self):
        assert QSeries.zero().delta() == math.inf


class TestInversion:
    def test_invert_unit_oracle(self):
        inv = series_invert_unit(mk({0: 1, 1: -1}), 6)
        assert inv == mk({i: 1 for i in range(6)}, prec=6)

    def test_invert_requires_unit(self):
        # leading coefficient must be +-1 over the integers
        with pytest.raises(NotInvertibleError):
            series_invert_unit(mk({0: 2, 1: 1}), 5)
        # any unit leading coefficient works, including shifted ones
        assert series_invert_unit(mk({1: 1}), 5).coeff(-1) == 1

    @given(terms, st.integers(min_value=1, max_value=12))
    @settings(max_examples=60, deadline=None)
    def test_invert_roundtrip(self, t, prec):
        t = dict(t)
        t[0] = 1
        t = {e: c for e, c in t.items() if e >= 0}
        u = mk(t)
        inv = series_invert_unit(u, prec)
        assert (u * inv).truncate(prec) == QSeries.one().truncate(prec)

    def test_exact_div(self):
        num = mk({0: 1, 3: -1})
        den = mk({0: 1, 1: -1})
        assert exact_div(num, den) == mk({0: 1, 1: 1, 2: 1})

    def test_exact_div_remainder(self):
        with pytest.raises(RemainderError):
            exact_div(mk({0: 1, 2: 1}), mk({0: 1, 1: -1}))


class TestBoundedSum:
    def test_geometric_tail(self):
        # term_k = q^k, degree bound k: sum to prec 10 is 1/(1-q)
        out = series_sum_bounded(
            lambda k: QSeries.monomial(k), DegreeBound(lambda k: Fraction(k)), 10
        )
        assert out == mk({i: 1 for i in range(10)}, prec=10)

    def test_bound_violation_detected(self):
        with pytest.raises(DegreeBoundError):
            series_sum_bounded(
                lambda k: QSeries.monomial(-k),
                DegreeBound(lambda k: Fraction(k)),
                5,
            )
