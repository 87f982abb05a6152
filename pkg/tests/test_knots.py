"""Knot registry, mirrors, and JSON-defined knots."""

import json

import pytest

from qhabiro import (
    CompositeCycleError,
    ExponentIntegralityError,
    KnotFileError,
    QSeries,
    UnknownKnotError,
    get_knot,
    knot_names,
    load_knots,
    mirror,
)


class TestRegistry:
    def test_builtin_names(self):
        for name in ("unknot", "3_1l", "3_1r", "4_1"):
            assert name in knot_names()

    def test_unknown(self):
        with pytest.raises(UnknownKnotError):
            get_knot("5_2")

    def test_unknot_coefficients(self):
        u = get_knot("unknot")
        assert u.f_coeff(0) == QSeries.one()
        assert u.f_coeff(3).is_zero


class TestMirror:
    def test_trefoil_mirror_pair(self):
        m = mirror("3_1l")
        r = get_knot("3_1r")
        for k in range(11):
            assert m.a_coeff(k) == r.a_coeff(k), k

    def test_involution(self):
        m2 = mirror(mirror("3_1l"))
        orig = get_knot("3_1l")
        for k in range(11):
            assert m2.a_coeff(k) == orig.a_coeff(k)

    def test_figure_eight_amphichiral(self):
        m = mirror("4_1")
        orig = get_knot("4_1")
        for k in range(11):
            assert m.a_coeff(k) == orig.a_coeff(k)


class TestClosedForms:
    def test_closed_forms_match_transform(self):
        from qhabiro import f_from_a

        for name in ("3_1l", "3_1r", "4_1"):
            spec = get_knot(name)
            via_transform = f_from_a(spec.a)
            for k in range(10):
                assert spec.f_coeff(k) == via_transform[k], (name, k)


def write_doc(tmp_path, doc, fname="knots.json"):
    p = tmp_path / fname
    p.write_text(json.dumps(doc))
    return p


class TestLoadKnots:
    def test_monomial_roundtrip(self, tmp_path):
        doc = [{
            "name": "test_trefoil_left_copy",
            "generator": {
                "kind": "monomial",
                "sign": {"alpha": 1, "beta": 1},
                "exponent": {"c2": "1/2", "c1": "-1/2", "c0": -1},
            },
        }]
        (spec,) = load_knots(write_doc(tmp_path, doc))
        ref = get_knot("3_1l")
        for k in range(12):
            assert spec.a_coeff(k) == ref.a_coeff(k)

    def test_list_generator_bounded(self, tmp_path):
        doc = [{
            "name": "test_list_knot",
            "generator": {
                "kind": "list",
                "coeffs": [QSeries.one().to_json(),
                           QSeries.monomial(2, -1).to_json()],
            },
        }]
        (spec,) = load_knots(write_doc(tmp_path, doc))
        assert spec.a_coeff(1) == QSeries.monomial(2, -1)
        with pytest.raises(IndexError):
            spec.a_coeff(2)

    def test_composite_sum(self, tmp_path):
        doc = [{
            "name": "test_composite_sum",
            "generator": {"kind": "composite", "summands": ["3_1l", "4_1"]},
        }]
        (spec,) = load_knots(write_doc(tmp_path, doc))
        for k in range(6):
            expected = get_knot("3_1l").a_coeff(k) + get_knot("4_1").a_coeff(k)
            assert spec.a_coeff(k) == expected

    def test_nonintegral_exponent_rejected(self, tmp_path):
        doc = [{
            "name": "test_bad_exponent",
            "generator": {
                "kind": "monomial",
                "sign": {"alpha": 0, "beta": 0},
                "exponent": {"c2": "1/5", "c1": 0, "c0": 0},
            },
        }]
        with pytest.raises(ExponentIntegralityError):
            load_knots(write_doc(tmp_path, doc))

    def test_composite_cycle_rejected(self, tmp_path):
        doc = [
            {"name": "test_cyc_a",
             "generator": {"kind": "composite", "summands": ["test_cyc_b"]}},
            {"name": "test_cyc_b",
             "generator": {"kind": "composite", "summands": ["test_cyc_a"]}},
        ]
        with pytest.raises(CompositeCycleError):
            load_knots(write_doc(tmp_path, doc))

    def test_duplicate_name_rejected(self, tmp_path):
        doc = [{
            "name": "4_1",
            "generator": {"kind": "monomial", "sign": {}, "exponent": {}},
        }]
        with pytest.raises(KnotFileError):
            load_knots(write_doc(tmp_path, doc))

    def test_invalid_json_rejected(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text("{not json")
        with pytest.raises(KnotFileError):
            load_knots(p)

    def test_unknown_kind_rejected(self, tmp_path):
        doc = [{"name": "test_unknown_kind", "generator": {"kind": "spline"}}]
        with pytest.raises(KnotFileError):
            load_knots(write_doc(tmp_path, doc))
