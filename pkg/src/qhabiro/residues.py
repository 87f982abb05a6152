"""Residues of inverted Habiro series: basis-function residue atoms,
residue families of coefficient sequences, the residue theorem defect,
conversions between residues and GM coefficients, and the worked q-series
identities (trefoil recurrences, figure-eight tails, descendants,
nonabelian branches).

All series are truncated at a caller-chosen precision; summation windows
are derived from the LBC constant so reported coefficients are certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Union

from .series import (
    DegreeBound,
    ExpLike,
    PrecisionError,
    QSeries,
    series_invert_unit,
    series_sum_bounded,
)
from .qcomb import qpoch
from .transform import CoeffSeq, LbcError, LbcReport, fk_degree_check

INF = math.inf


def _binom2(n: int) -> Fraction:
    return Fraction(n * (n - 1), 2)


_PREC_BUCKET = 64


def _bucket(prec: Fraction) -> int:
    n = int(math.ceil(prec))
    return ((n + _PREC_BUCKET - 1) // _PREC_BUCKET) * _PREC_BUCKET


@lru_cache(maxsize=None)
def _qpoch_inf_trunc(prec_int: int) -> QSeries:
    """(q)_inf to O(q^prec_int) via the pentagonal-number expansion."""
    coeffs = [0] * prec_int
    n = 0
    while True:
        hit = False
        for e, s in ((n * (3 * n - 1) // 2, (-1) ** n),
                     (n * (3 * n + 1) // 2, (-1) ** n)):
            if e < prec_int:
                coeffs[e] = s
                hit = True
        if not hit:
            break
        n += 1
    return QSeries(coeffs, 0, 1, prec_int)


@lru_cache(maxsize=None)
def _inv_qpoch(m, prec_int: int) -> QSeries:
    """1/(q)_m to O(q^prec_int); m a nonnegative integer or math.inf."""
    if prec_int <= 0:
        return QSeries.zero(prec_int)
    if m == INF:
        return series_invert_unit(_qpoch_inf_trunc(prec_int), prec_int)
    if m == 0:
        return QSeries.one().truncate(prec_int)
    geom = QSeries([1 if i % m == 0 else 0 for i in range(prec_int)],
                   0, 1, prec_int)
    return (_inv_qpoch(m - 1, prec_int) * geom).truncate(prec_int)


def _inv_poch_product(indices: tuple, prec: ExpLike) -> QSeries:
    """1/prod_m (q)_m to O(q^prec), computed on a cached precision grid."""
    prec = Fraction(prec)
    if prec <= 0:
        return QSeries.zero(prec)
    pb = _bucket(prec)
    acc = QSeries.one().truncate(pb)
    for m in sorted(indices, reverse=True):
        # build the 1/(q)_m chain iteratively to keep recursion shallow
        for mm in range(1, m + 1 if m != INF else 1):
            _inv_qpoch(mm, pb)
        acc = (acc * _inv_qpoch(m, pb)).truncate(pb)
    return acc.truncate(prec)


@dataclass(frozen=True)
class ResidueAtom:
    """Residue of the basis function with k+1 inverted factors at x=q^j
    (or at x=infinity), kept symbolic: sign * q^exponent / prod (q)_d."""

    k: int
    j: Union[int, float]
    sign: int
    exponent: Fraction
    denom: tuple

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def to_series(self, prec: ExpLike) -> QSeries:
        if self.sign == 0:
            return QSeries.zero(prec)
        inv = _inv_poch_product(self.denom, Fraction(prec) - self.exponent)
        return (self.sign * QSeries.monomial(self.exponent) * inv).truncate(prec)


def residue_sigma(k: int, j: Union[int, float]) -> ResidueAtom:
    """Residue atom at x=q^j (j integer) or x=infinity (j=math.inf)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if j == INF:
        if k == 0:
            return ResidueAtom(k, INF, 1, Fraction(0), ())
        return ResidueAtom(k, INF, 0, Fraction(0), ())
    if abs(j) > k:
        return ResidueAtom(k, j, 0, Fraction(0), ())
    sign = 1 if (k + j + 1) % 2 == 0 else -1
    exponent = _binom2(j + 1) + _binom2(k + 1)
    return ResidueAtom(k, j, sign, exponent, (k - j, k + j))


def _lbc_constant(C) -> Fraction:
    if C is None:
        raise LbcError("LBC required")
    if isinstance(C, LbcReport):
        return C.constant
    return Fraction(C)


@dataclass(frozen=True)
class ResidueFamily:
    """Residues r_j for |j| <= J plus r_infinity, all at one precision."""

    J: int
    rmap: dict
    r_inf: QSeries
    prec: Fraction
    lbc_constant: Fraction

    def r(self, j: int) -> QSeries:
        if abs(j) > self.J:
            raise KeyError("residue index %d outside window J=%d" % (j, self.J))
        return self.rmap[j]

    def symmetry_defect(self, j: int) -> QSeries:
        """r_{-j} - q^{-j} r_j, zero-to-prec when the family is consistent."""
        p = self.prec - max(0, -j)
        return (self.r(-j) - self.r(j).shift(-j)).truncate(p)


def residue_series(a: CoeffSeq, j: int, prec: ExpLike, C) -> QSeries:
    """r_j = -sum_{k>=|j|} a_{-k-1} (-1)^{k+j}
    q^{binom(k+1,2)+binom(j+1,2)} / ((q)_{k+j}(q)_{k-j}), to O(q^prec)."""
    C = _lbc_constant(C)
    target = Fraction(prec)

    def term(k: int) -> QSeries:
        atom = residue_sigma(k, j)
        ak = a[k]
        if atom.is_zero or (ak.is_zero and ak.is_exact):
            return QSeries.zero(target)
        return (ak * atom.to_series(target - ak.delta_lb())).truncate(target)

    bound = DegreeBound(lambda k: _binom2(j + 1) + k + C)
    return series_sum_bounded(term, bound, target)


def residue_family(a: CoeffSeq, J: int, prec: ExpLike, C=None) -> ResidueFamily:
    """All residues with |j| <= J; requires an LBC constant (or report)."""
    C = _lbc_constant(C)
    target = Fraction(prec)
    rmap = {j: residue_series(a, j, target, C) for j in range(-J, J + 1)}
    return ResidueFamily(J, rmap, a[0].truncate(target), target, C)


def residue_theorem_window(prec: ExpLike, C) -> int:
    """Smallest J with binom(J+1,2) + C >= prec, so residues outside
    [-J, J] cannot contribute below the precision."""
    target = Fraction(prec)
    C = _lbc_constant(C)
    J = 0
    while _binom2(J + 1) + C < target:
        J += 1
    return J


def residue_theorem_check(a: CoeffSeq, prec: ExpLike, C=None) -> QSeries:
    """The defect sum_j r_j + r_inf; zero-to-prec when the residue
    theorem holds."""
    C = _lbc_constant(C)
    target = Fraction(prec)
    J = residue_theorem_window(target, C)
    fam = residue_family(a, J, target, C)
    acc = fam.r_inf
    for j in range(-J, J + 1):
        acc = acc + fam.rmap[j]
    return acc.truncate(target)


def f_from_residues(rf: ResidueFamily, k: int, prec: ExpLike) -> QSeries:
    """f_k = -r_0 - sum_{j>=1} (q^{-j(k+1)} + q^{jk}) r_j."""
    target = Fraction(prec)
    C = rf.lbc_constant
    j_need = 0
    j = 1
    while True:
        g = _binom2(j + 1) + min(-j * (k + 1), j * k) + C
        if g < target:
            j_need = j
        elif j > k + 1:
            break
        j += 1
    if j_need > rf.J:
        raise PrecisionError("enlarge J")
    acc = -rf.r(0)
    for j in range(1, j_need + 1):
        acc = acc - (rf.r(j).shift(-j * (k + 1)) + rf.r(j).shift(j * k))
    if not acc.is_exact and acc.prec_q < target:
        raise PrecisionError("enlarge J")
    return acc.truncate(target)


def residues_from_f(f: CoeffSeq, j: int, prec: ExpLike, C) -> QSeries:
    """The theta-function route:

        r_j = -(q^{binom(j+1,2)}/(q)_inf^3) sum_k f_k (-1)^{k+j}
              q^{binom(k+1,2)} (1 + sum_{n>=1} (-1)^n
              q^{binom(n+1,2)+nk}(q^{nj} + q^{-nj})).

    Requires the f-side degree bound inherited from an LBC constant C.
    """
    C = _lbc_constant(C)
    target = Fraction(prec)
    K_max = max(abs(j), int(math.ceil(target - C - 1)))
    if not fk_degree_check(f, C, min(K_max, 10**6)):
        raise LbcError("theta route requires LBC-grade input")
    acc = QSeries.zero(target)
    for k in range(K_max + 1):
        fk = f[k]
        if fk.is_zero:
            continue
        base_delta = fk.delta_lb() + _binom2(k + 1)
        theta = QSeries.one()
        n = 1
        while True:
            e = _binom2(n + 1) + n * k
            if e + min(n * j, -n * j) + base_delta >= target and n > abs(j) - k:
                break
            s = -1 if n % 2 else 1
            theta = theta + QSeries.monomial(e + n * j, s) + QSeries.monomial(e - n * j, s)
            n += 1
        sign = 1 if (k + j) % 2 == 0 else -1
        term = fk * QSeries.monomial(_binom2(k + 1), sign) * theta
        acc = (acc + term).truncate(target)
    inv3 = _inv_poch_product((INF, INF, INF), target)
    return (-(QSeries.monomial(_binom2(j + 1)) * acc * inv3)).truncate(target)


def trefoil_recurrence_check(kind: str, J: int, prec: ExpLike) -> bool:
    """Check the residue q-recurrences of the trefoils on 0 <= j < J.

    Left-handed: r_{j+1} = -q^{3j+2} r_j.  Right-handed:
    r_{j+1} = -q^{-3j-1} r_j + (-1)^j q^{binom(j+1,2)} (q^{-2j}-q)/(q)_inf^2
    (sign of the inhomogeneous term fixed against the tabulated residues),
    plus stabilization of (-1)^j q^{-binom(j+2,2)} r_j to (q)_inf^{-2}.
    """
    from .knots import get_knot

    target = Fraction(prec)
    if kind not in ("L", "R"):
        raise ValueError("kind must be 'L' or 'R'")
    if J == 0:
        return True
    if kind == "L":
        fam = residue_family(get_knot("3_1l").a, J, target, Fraction(-2))
        for j in range(J):
            lhs = fam.r(j + 1)
            rhs = -fam.r(j).shift(3 * j + 2)
            if lhs.truncate(target) != rhs.truncate(target):
                return False
        return True

    fam = residue_family(get_knot("3_1r").a, J, target, Fraction(0))
    inv2 = _inv_poch_product((INF, INF), target)
    for j in range(J):
        p = target - (3 * j + 2)
        lhs = fam.r(j + 1)
        sign = -1 if j % 2 else 1
        extra = QSeries.monomial(-2 * j) - QSeries.monomial(1)
        rhs = -fam.r(j).shift(-3 * j - 1) \
            + sign * QSeries.monomial(_binom2(j + 1)) * extra * inv2
        if lhs.truncate(p) != rhs.truncate(p):
            return False
    prev = None
    for j in range(J + 1):
        p = target - _binom2(j + 2)
        if prev is not None and p <= prev:
            # remaining windows are shallower than the agreement already
            # certified, so they cannot witness further stabilization
            break
        sign = -1 if j % 2 else 1
        norm = sign * fam.r(j).shift(-_binom2(j + 2))
        d = (norm - inv2).truncate(p).delta_lb()
        if prev is not None and d < prev:
            return False
        prev = d
    return True


def descendant(a: CoeffSeq, m: int) -> CoeffSeq:
    """a_{-k-1} -> a_{-k-1} q^{km}."""
    return CoeffSeq("P", lambda k: a[k] * QSeries.monomial(k * m), a.max_index)


def branch_coeffs_41(branch: str, prec: ExpLike) -> CoeffSeq:
    """Inverted Habiro coefficients of the two nonabelian branches of 4_1:
    q^{k^2}/(q)_k for +1/2 and (-1)^k q^{-binom(k,2)}/(q)_k for -1/2,
    truncated at prec."""
    target = Fraction(prec)
    if branch == "+1/2":
        def gen(k: int) -> QSeries:
            return (QSeries.monomial(k * k)
                    * _inv_poch_product((k,), target - k * k)).truncate(target)
    elif branch == "-1/2":
        def gen(k: int) -> QSeries:
            sign = -1 if k % 2 else 1
            e = -_binom2(k)
            return (QSeries.monomial(e, sign)
                    * _inv_poch_product((k,), target - e)).truncate(target)
    else:
        raise ValueError("branch must be '+1/2' or '-1/2'")
    return CoeffSeq("P", gen)


def branch_residue_41(
    branch: str, j: int, prec: ExpLike, route: str = "closed"
) -> QSeries:
    """Residues of the nonabelian-branch series of 4_1 at x=q^j.

    route 'closed' evaluates the stated single sums; route 'family' runs
    the generic residue machinery on the branch coefficients and applies
    the q^{-+j^2} evaluation of the branch prefactor.
    """
    target = Fraction(prec)
    if route == "family":
        C = Fraction(-1)
        rj = residue_series(branch_coeffs_41(branch, target + j * j), j,
                            target + (j * j if branch == "+1/2" else -j * j), C)
        shift = -j * j if branch == "+1/2" else j * j
        return rj.shift(shift).truncate(target)
    if route != "closed":
        raise ValueError("route must be 'closed' or 'family'")

    if branch == "+1/2":
        def term(k: int) -> QSeries:
            if k < abs(j):
                return QSeries.zero(target)
            e = Fraction(3 * k * k + k - j * j + j, 2)
            sign = -1 if (k + j) % 2 == 0 else 1
            return (QSeries.monomial(e, sign)
                    * _inv_poch_product((k + j, k - j, k), target - e)).truncate(target)

        bound = DegreeBound(
            lambda k: Fraction(3 * k * k + k - j * j + j, 2), max(1, abs(j)))
    elif branch == "-1/2":
        def term(k: int) -> QSeries:
            if k < abs(j):
                return QSeries.zero(target)
            e = k + Fraction(j * (3 * j + 1), 2)
            sign = 1 if j % 2 else -1
            return (QSeries.monomial(e, sign)
                    * _inv_poch_product((k + j, k - j, k), target - e)).truncate(target)

        bound = DegreeBound(lambda k: k + Fraction(j * (3 * j + 1), 2), abs(j))
    else:
        raise ValueError("branch must be '+1/2' or '-1/2'")
    return series_sum_bounded(term, bound, target)


def sign_constancy(s: QSeries) -> bool:
    """True iff all known coefficients share one sign (observation only)."""
    signs = {1 if c > 0 else -1 for c in s.coeffs if c}
    return len(signs) <= 1


def tail_check(parity: str, n: int, prec: ExpLike):
    """Normalized figure-eight coefficient q^{-delta(f_k)} f_k against its
    stabilized theta-quotient target; returns (normalized, target,
    agree_to) with agree_to the first disagreement exponent (or prec)."""
    from .knots import f_coeff

    target_prec = Fraction(prec)
    if parity == "even":
        k = 2 * n
        expo = lambda m: m * m
    elif parity == "odd":
        k = 2 * n + 1
        expo = lambda m: m * m + m
    else:
        raise ValueError("parity must be 'even' or 'odd'")
    fk = f_coeff("4_1", k)
    normalized = fk.shift(-fk.delta()).truncate(target_prec)
    theta = QSeries.zero()
    m_max = int(math.isqrt(int(target_prec))) + 2
    for m in range(-m_max, m_max + 1):
        if expo(m) < target_prec:
            theta = theta + QSeries.monomial(expo(m))
    inv1 = _inv_poch_product((INF,), target_prec)
    tail_target = (theta * inv1).truncate(target_prec)
    diff = (normalized - tail_target).truncate(target_prec)
    agree_to = diff.delta_lb() if not diff.is_zero or not diff.is_exact else target_prec
    return normalized, tail_target, min(Fraction(agree_to), target_prec)
