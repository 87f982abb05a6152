"""Knot registry: built-in coefficient generators, user-defined knots
from JSON files, mirrors, and composite (coefficientwise sum) entries.

Each knot provides its inverted Habiro coefficients a_{-k-1} through a
generator; GM coefficients f_k come either from a closed form (validated
against the transform on first use) or from the transform itself.
"""

from __future__ import annotations

import json
import threading
from fractions import Fraction
from typing import Callable, Optional

from .series import ExactnessError, QAlgebraError, QSeries, series_mirror
from .qcomb import jacobi_symbol, qbinom
from .transform import CoeffSeq, a_from_f, f_from_a

CROSSCHECK_PREFIX = 8
INTEGRALITY_WINDOW = 64


class KnotError(QAlgebraError):
    pass


class UnknownKnotError(KnotError):
    pass


class KnotFileError(KnotError):
    """Knot file does not match the schema."""


class ExponentIntegralityError(KnotError):
    """A monomial generator's exponent is non-integral at some index."""


class CompositeCycleError(KnotError):
    """Composite knot references form a cycle."""


class ClosedFormError(KnotError):
    """A closed-form f-coefficient disagrees with the transform."""


class KnotSpec:
    """A named knot with lazy coefficient sequences.

    ``a_gen`` maps k >= 0 to a_{-k-1}; ``f_closed`` (optional) maps
    k >= 0 to f_k directly and is cross-checked against the transform on
    a short prefix the first time it is used.
    """

    def __init__(
        self,
        name: str,
        a_gen: Callable[[int], QSeries],
        f_closed: Optional[Callable[[int], QSeries]] = None,
        max_index: Optional[int] = None,
        meta: Optional[dict] = None,
    ):
        self.name = name
        self.meta = dict(meta or {})
        self.a = CoeffSeq("P", a_gen, max_index)
        self._f_transform = f_from_a(self.a)
        self._f_closed = f_closed
        self._f_checked = False
        self._check_lock = threading.Lock()

    def a_coeff(self, k: int) -> QSeries:
        return self.a[k]

    def f_coeff(self, k: int) -> QSeries:
        if self._f_closed is None:
            return self._f_transform[k]
        if not self._f_checked:
            with self._check_lock:
                if not self._f_checked:
                    top = CROSSCHECK_PREFIX
                    if self.a.max_index is not None:
                        top = min(top, self.a.max_index + 1)
                    for i in range(top):
                        if self._f_closed(i) != self._f_transform[i]:
                            raise ClosedFormError("closed form inconsistent")
                    self._f_checked = True
        return self._f_closed(k)

    @property
    def f(self) -> CoeffSeq:
        return CoeffSeq("F", self.f_coeff, self.a.max_index)


def _monomial_gen(alpha: int, beta: int, c2: Fraction, c1: Fraction, c0: Fraction):
    def gen(k: int) -> QSeries:
        e = c2 * k * k + c1 * k + c0
        if e.denominator != 1:
            raise ExponentIntegralityError(
                "monomial exponent %s is non-integral at k=%d" % (e, k)
            )
        sign = -1 if (alpha * k + beta) % 2 else 1
        return QSeries.monomial(e, sign)

    return gen


def _check_monomial_integrality(c2: Fraction, c1: Fraction, c0: Fraction):
    for k in range(INTEGRALITY_WINDOW + 1):
        e = c2 * k * k + c1 * k + c0
        if e.denominator != 1:
            raise ExponentIntegralityError(
                "monomial exponent %s is non-integral at k=%d" % (e, k)
            )


def _unknot_a_gen():
    f = CoeffSeq("F", lambda i: QSeries.one() if i == 0 else QSeries.zero())
    return a_from_f(f).__getitem__


def _f_trefoil(chirality: str) -> Callable[[int], QSeries]:
    sgn = -1 if chirality == "l" else 1

    def f(k: int) -> QSeries:
        j = jacobi_symbol(3, 2 * k + 1)
        if j == 0:
            return QSeries.zero()
        e = sgn * (Fraction(k * (k + 1), 6) + 1)
        return QSeries.monomial(e, -j)

    return f


def _f_41(n: int) -> QSeries:
    acc = QSeries.zero()
    for i in range(n + 1):
        acc = acc + qbinom(n + i, 2 * i)
    return acc


_HALF = Fraction(1, 2)

_REGISTRY: dict = {}
_REGISTRY_LOCK = threading.Lock()


def _register(spec: KnotSpec):
    with _REGISTRY_LOCK:
        if spec.name in _REGISTRY:
            raise KnotError("knot %r already registered" % spec.name)
        _REGISTRY[spec.name] = spec


def _install_builtins():
    _register(KnotSpec(
        "unknot",
        _unknot_a_gen(),
        lambda i: QSeries.one() if i == 0 else QSeries.zero(),
        meta={"crossings": 0},
    ))
    _register(KnotSpec(
        "3_1l",
        _monomial_gen(1, 1, _HALF, -_HALF, Fraction(-1)),
        _f_trefoil("l"),
        meta={"crossings": 3, "chirality": "left"},
    ))
    _register(KnotSpec(
        "3_1r",
        _monomial_gen(1, 1, -_HALF, _HALF, Fraction(1)),
        _f_trefoil("r"),
        meta={"crossings": 3, "chirality": "right"},
    ))
    _register(KnotSpec(
        "4_1",
        lambda k: QSeries.one(),
        _f_41,
        meta={"crossings": 4, "chirality": "amphichiral"},
    ))


_install_builtins()


def get_knot(name: str) -> KnotSpec:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownKnotError("unknown knot %r" % name) from None


def knot_names() -> list:
    return sorted(_REGISTRY)


def a_coeff(knot, k: int) -> QSeries:
    if isinstance(knot, str):
        knot = get_knot(knot)
    return knot.a_coeff(k)


def f_coeff(knot, k: int) -> QSeries:
    if isinstance(knot, str):
        knot = get_knot(knot)
    return knot.f_coeff(k)


def mirror(knot) -> KnotSpec:
    """q -> q^{-1} on every coefficient; requires exact coefficients."""
    if isinstance(knot, str):
        knot = get_knot(knot)

    def gen(k: int) -> QSeries:
        a = knot.a_coeff(k)
        if not a.is_exact:
            raise ExactnessError("mirror requires exact coefficients")
        return series_mirror(a)

    return KnotSpec(knot.name + "!", gen, max_index=knot.a.max_index,
                    meta=dict(knot.meta, mirror_of=knot.name))


def _parse_fraction(v) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise KnotFileError("expected integer or fraction string, got %r" % (v,))
    try:
        return Fraction(v)
    except (ValueError, ZeroDivisionError) as e:
        raise KnotFileError("bad rational %r" % (v,)) from e


def _build_from_entry(entry: dict, local: dict) -> KnotSpec:
    if not isinstance(entry, dict):
        raise KnotFileError("knot entry must be an object")
    name = entry.get("name")
    if not isinstance(name, str) or not name:
        raise KnotFileError("knot entry needs a nonempty name")
    gen_spec = entry.get("generator")
    if not isinstance(gen_spec, dict) or "kind" not in gen_spec:
        raise KnotFileError("knot %r needs a generator with a kind" % name)
    convention = entry.get("convention", {})
    if not isinstance(convention, dict):
        raise KnotFileError("convention must be an object")
    if convention.get("x_half_shift", False):
        raise KnotFileError("x_half_shift convention is not supported")

    kind = gen_spec["kind"]
    max_index = None
    if kind == "monomial":
        sign = gen_spec.get("sign", {})
        exp = gen_spec.get("exponent", {})
        if not isinstance(sign, dict) or not isinstance(exp, dict):
            raise KnotFileError("monomial generator needs sign and exponent objects")
        alpha = sign.get("alpha", 0)
        beta = sign.get("beta", 0)
        if not isinstance(alpha, int) or not isinstance(beta, int):
            raise KnotFileError("sign exponents must be integers")
        c2 = _parse_fraction(exp.get("c2", 0))
        c1 = _parse_fraction(exp.get("c1", 0))
        c0 = _parse_fraction(exp.get("c0", 0))
        _check_monomial_integrality(c2, c1, c0)
        gen = _monomial_gen(alpha, beta, c2, c1, c0)
    elif kind == "list":
        coeffs = gen_spec.get("coeffs")
        if not isinstance(coeffs, list) or not coeffs:
            raise KnotFileError("list generator needs a nonempty coeffs array")
        data = [QSeries.from_json(c) for c in coeffs]
        max_index = len(data) - 1
        gen = data.__getitem__
    elif kind == "composite":
        summands = gen_spec.get("summands")
        if not isinstance(summands, list) or not summands:
            raise KnotFileError("composite generator needs a summands array")
        for s in summands:
            if not isinstance(s, str):
                raise KnotFileError("composite summands must be knot names")

        def gen(k: int, _names=tuple(summands)) -> QSeries:
            acc = QSeries.zero()
            for s in _names:
                spec = local.get(s) or get_knot(s)
                acc = acc + spec.a_coeff(k)
            return acc
    else:
        raise KnotFileError("unknown generator kind %r" % (kind,))

    f_closed = None
    handle = entry.get("f_closed_form")
    if handle is not None:
        if not (isinstance(handle, str) and handle.startswith("builtin:")):
            raise KnotFileError("f_closed_form must be a builtin: handle")
        f_closed = get_knot(handle[len("builtin:"):]).f_coeff

    return KnotSpec(name, gen, f_closed, max_index=max_index,
                    meta=entry.get("metadata", {}))


def _check_acyclic(entries: list, local: dict):
    graph = {}
    for entry in entries:
        gen_spec = entry["generator"]
        if gen_spec.get("kind") == "composite":
            graph[entry["name"]] = list(gen_spec["summands"])

    state: dict = {}

    def visit(name: str):
        if state.get(name) == 2:
            return
        if state.get(name) == 1:
            raise CompositeCycleError("cyclic composite reference through %r" % name)
        state[name] = 1
        for dep in graph.get(name, ()):
            if dep in local:
                visit(dep)
            elif dep not in _REGISTRY:
                raise KnotFileError("composite references unknown knot %r" % dep)
        state[name] = 2

    for name in graph:
        visit(name)


def load_knots(path) -> list:
    """Register knots from a JSON file; returns the new KnotSpecs."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise KnotFileError("invalid JSON: %s" % e) from e
    entries = doc if isinstance(doc, list) else [doc]
    local: dict = {}
    specs = []
    for entry in entries:
        spec = _build_from_entry(entry, local)
        if spec.name in local or spec.name in _REGISTRY:
            raise KnotFileError("duplicate knot name %r" % spec.name)
        local[spec.name] = spec
        specs.append(spec)
    _check_acyclic(entries, local)
    for spec in specs:
        _register(spec)
    return specs
