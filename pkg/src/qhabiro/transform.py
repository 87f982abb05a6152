"""Coefficient dictionary between GM-series coefficients f_i and inverted
Habiro coefficients a_{-k-1}, plus lower-bound-condition bookkeeping.

Both directions of the dictionary are triangular with unit diagonal, so
the default inverse direction is a division-free back-substitution; the
closed-form double sum (with its exact division and integrality check) is
kept as an alternative route for cross-validation.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import inf
from typing import Callable, Optional

from .series import (
    DeltaAtLeast,
    QAlgebraError,
    QSeries,
    exact_div,
    series_invert_unit,
    series_dot,
)
from .qcomb import qbinom, qint, qfact


class LbcError(QAlgebraError):
    """An operation required a verified lower bound condition."""


class IntegralityError(QAlgebraError):
    """The closed-form transform did not divide out exactly."""


class CoeffSeq:
    """Lazy, memoized family of QSeries coefficients.

    side 'F': index k holds f_k.  side 'P': index k holds a_{-k-1}.
    ``max_index`` of None means the generator is defined for every k >= 0.
    Memo reads are safe under concurrency; generation is pure.
    """

    def __init__(
        self,
        side: str,
        gen: Callable[[int], QSeries],
        max_index: Optional[int] = None,
    ):
        if side not in ("F", "P"):
            raise ValueError("side must be 'F' or 'P'")
        self.side = side
        self._gen = gen
        self.max_index = max_index
        self._memo: dict = {}
        self._lock = threading.Lock()

    def __getitem__(self, k: int) -> QSeries:
        if k < 0:
            raise IndexError("coefficient indices start at 0")
        if self.max_index is not None and k > self.max_index:
            raise IndexError("index beyond provided data")
        try:
            return self._memo[k]
        except KeyError:
            pass
        val = self._gen(k)
        with self._lock:
            return self._memo.setdefault(k, val)

    def prefix(self, K: int) -> list:
        return [self[k] for k in range(K + 1)]


@dataclass(frozen=True)
class LbcReport:
    """Result of checking delta(a_{-k-1}) >= -(k+1)(k-2)/2 + C on a prefix.

    ``constant`` is the largest C for which the inequality holds for all
    checked indices; ``indeterminate`` lists indices whose coefficient
    vanishes up to its precision, where only a lower bound on delta is
    known (the reported constant is then itself only a lower bound).
    """

    checked_range: int
    constant: Fraction
    indeterminate: tuple = ()

    @property
    def has_warnings(self) -> bool:
        return bool(self.indeterminate)


def lbc_margin(k: int) -> Fraction:
    """-n(n+3)/2 at n = -k-1: the LBC reference degree for a_{-k-1}."""
    return Fraction(-(k + 1) * (k - 2), 2)


def lbc_check(a: CoeffSeq, K: int) -> LbcReport:
    """Best lower-bound-condition constant over indices 0..K."""
    if a.side != "P":
        raise ValueError("lbc_check applies to P-side sequences")
    best = inf
    indeterminate = []
    for k in range(K + 1):
        d = a[k].delta()
        if isinstance(d, DeltaAtLeast):
            indeterminate.append(k)
            d = d.bound
        if d == inf:
            continue
        margin = d - lbc_margin(k)
        if margin < best:
            best = margin
    if best == inf:
        best = Fraction(0)
    return LbcReport(K, Fraction(best), tuple(indeterminate))


def sigma_tilde_x_expansion(k: int, x_order: int) -> list:
    """Taylor coefficients of x^k..x^{k+x_order} of the normalized basis
    function with k+1 inverted factors; entry j is [2k+j choose j]."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return [qbinom(2 * k + j, j) for j in range(x_order + 1)]


def f_from_a(a: CoeffSeq, K: Optional[int] = None) -> CoeffSeq:
    """GM coefficients from inverted Habiro coefficients:
    f_i = sum_{k=0}^{i} [k+i choose 2k] a_{-k-1}."""
    if a.side != "P":
        raise ValueError("f_from_a expects a P-side sequence")

    def gen(i: int) -> QSeries:
        return series_dot((qbinom(k + i, 2 * k), a[k]) for k in range(i + 1))

    if K is None:
        max_index = a.max_index
    else:
        max_index = K if a.max_index is None else min(K, a.max_index)
    return CoeffSeq("F", gen, max_index)


def a_from_f(f: CoeffSeq, K: Optional[int] = None, method: str = "solve") -> CoeffSeq:
    """Inverted Habiro coefficients from GM coefficients.

    method 'solve' inverts the unit-diagonal triangular system
    f_i = sum_k [k+i choose 2k] a_{-k-1} by back-substitution (exact,
    division-free).  method 'closed' evaluates the explicit formula
    a_{-k-1} = sum_i (-1)^{k+i} [2k choose k-i] [2i+1]/[k+i+1] f_i over a
    common denominator and performs the exact division, raising
    IntegralityError if a remainder survives.
    """
    if f.side != "F":
        raise ValueError("a_from_f expects an F-side sequence")
    if method not in ("solve", "closed"):
        raise ValueError("method must be 'solve' or 'closed'")
    if K is None:
        max_index = f.max_index
    else:
        max_index = K if f.max_index is None else min(K, f.max_index)

    if method == "solve":
        seq = CoeffSeq("P", lambda k: None, max_index)

        _one = QSeries.one()

        def gen(k: int) -> QSeries:
            pairs = [(f[k], _one)]
            pairs += [(qbinom(j + k, 2 * j), -seq[j]) for j in range(k)]
            return series_dot(pairs)

        seq._gen = gen
        return seq

    def gen_closed(k: int) -> QSeries:
        # common denominator D = [k+1][k+2]...[2k+1]
        den = exact_div(qfact(2 * k + 1), qfact(k))
        num = QSeries.zero()
        for i in range(k + 1):
            cof = exact_div(den, qint(k + i + 1))
            term = qbinom(2 * k, k - i) * qint(2 * i + 1) * cof * f[i]
            num = num + (term if (k + i) % 2 == 0 else -term)
        if num.is_exact:
            try:
                return exact_div(num, den)
            except QAlgebraError as e:
                raise IntegralityError("transform integrality violated") from e
        if num.prec_q is None:
            raise IntegralityError("transform integrality violated")
        return num * series_invert_unit(den, num.prec_q - num.delta_lb() - den.delta_lb())

    return CoeffSeq("P", gen_closed, max_index)


def fk_degree_bound(i: int, C) -> Fraction:
    """Lower bound on delta(f_i) inherited from an LBC constant C.

    In v-degrees the bound is -i(i-1) + 2C + 2; stated here in q-units:
    -binom(i,2) + C + 1.
    """
    return Fraction(-(i * (i - 1)), 2) + Fraction(C) + 1


def fk_degree_check(f: CoeffSeq, C, K: int) -> bool:
    """True iff delta(f_i) >= -binom(i,2) + C + 1 for all i <= K."""
    for i in range(K + 1):
        if f[i].delta_lb() < fk_degree_bound(i, C):
            return False
    return True
