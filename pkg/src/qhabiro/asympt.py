"""Numerical asymptotics of the series coefficients f_n at roots of unity.

Covers: exact coefficient polynomials, arbitrary-precision evaluation at
q = e^{2*pi*i/N}, the periodicity of f_n(zeta_n) for the figure-eight
knot, volume growth of f_n(zeta_{2n}) with Richardson acceleration,
extraction of the perturbative series Phi^F, and the exact-rational
quotient check Phi^J / sqrt(Phi^F).

Conventions: the perturbative series are written as
Phi(h) = prefactor * sum_k c_k u^k / k! with u = h / (72*sqrt(-3)); for
h = 2*pi*i/n this makes u = pi/(36*sqrt(3)*n) real and positive, so all
coefficient arithmetic stays in Q with the radicals isolated in the
prefactor tag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import mpmath as mp

from .knots import KnotSpec, get_knot
from .series import QAlgebraError, QSeries

DEFAULT_BITS = 256


class AsymptoticsError(QAlgebraError):
    pass


class PrecisionError(AsymptoticsError):
    """Requested precision is insufficient; carries a suggested bit count."""

    def __init__(self, message: str, suggested_bits: int):
        super().__init__(message)
        self.suggested_bits = suggested_bits


class ExtrapolationError(AsymptoticsError):
    pass


class IntegralityError(AsymptoticsError):
    pass


def _resolve_knot(knot) -> KnotSpec:
    if isinstance(knot, str):
        return get_knot(knot)
    return knot


# ---------------------------------------------------------------------------
# Exact coefficient polynomials and evaluation at roots of unity
# ---------------------------------------------------------------------------


def f_poly_exact(knot, n: int) -> QSeries:
    """Exact integer Laurent polynomial f_n of the knot."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    poly = _resolve_knot(knot).f_coeff(n)
    if not poly.is_exact:
        raise AsymptoticsError("coefficient f_%d is not exact" % n)
    return poly


def is_palindromic(poly: QSeries) -> bool:
    """True when the polynomial is invariant under q -> 1/q."""
    return poly == poly.mirror()


def _coeff_magnitude_bits(poly: QSeries) -> int:
    total = sum(abs(c) for c in poly.coeffs)
    return total.bit_length() if total else 1


def eval_root_of_unity(poly: QSeries, N: int, bits: int) -> "mp.mpc":
    """Evaluate an exact Laurent polynomial at q = e^{2*pi*i/N} by Horner.

    Exponents on the half-integer grid use the principal branch
    e^{2*pi*i*exponent/N}.  Raises PrecisionError when ``bits`` cannot
    cover the coefficient magnitude with a 64-bit guard.
    """
    if N <= 0:
        raise ValueError("N must be positive")
    if not poly.is_exact:
        raise AsymptoticsError("polynomial must be exact")
    needed = 64 + _coeff_magnitude_bits(poly)
    if bits < needed:
        raise PrecisionError(
            "need at least %d bits for this polynomial" % needed, needed
        )
    if poly.is_zero:
        return mp.mpc(0)
    with mp.workprec(bits):
        # exponent of coeffs[i] is (offset + i)/scale
        w = mp.expjpi(mp.mpf(2) / (N * poly.scale))
        acc = mp.mpc(0)
        for c in reversed(poly.coeffs):
            acc = acc * w + c
        phase = mp.expjpi(mp.mpf(2 * poly.offset) / (N * poly.scale))
        return acc * phase


# ---------------------------------------------------------------------------
# Fast figure-eight evaluator (Gaussian binomials via q-Lucas)
# ---------------------------------------------------------------------------


class _RootData:
    """Powers of zeta_N and prefix products prod_{j<=m}(1 - zeta^j), m < N."""

    def __init__(self, N: int, bits: int):
        self.N = N
        self.bits = bits
        with mp.workprec(bits):
            w = mp.expjpi(mp.mpf(2) / N)
            powers = [mp.mpc(1)]
            for _ in range(N - 1):
                powers.append(powers[-1] * w)
            prefix = [mp.mpc(1)]
            for m in range(1, N):
                prefix.append(prefix[-1] * (1 - powers[m]))
            self.powers = powers
            self.prefix = prefix

    def gauss_binom(self, a: int, b: int):
        """Unbalanced Gaussian binomial C[a, b] at zeta_N via q-Lucas."""
        if b < 0 or b > a:
            return mp.mpc(0)
        N = self.N
        hi = math.comb(a // N, b // N)
        if hi == 0:
            return mp.mpc(0)
        r, s = a % N, b % N
        if s > r:
            return mp.mpc(0)
        return hi * self.prefix[r] / (self.prefix[s] * self.prefix[r - s])


def f41_eval(n: int, N: int, bits: int = DEFAULT_BITS,
             root: Optional[_RootData] = None) -> "mp.mpc":
    """f_n of the figure-eight knot at q = zeta_N, via
    f_n = sum_i [n+i choose 2i] and q-Lucas reduction of each balanced
    binomial ([m choose k] = q^{-k(m-k)/2} C[m, k]; here k(m-k)/2 = i(n-i)).
    """
    if root is None or root.N != N:
        root = _RootData(N, bits)
    with mp.workprec(bits):
        total = mp.mpc(0)
        for i in range(n + 1):
            c = root.gauss_binom(n + i, 2 * i)
            if c == 0:
                continue
            total += c * root.powers[(-i * (n - i)) % N]
        return total


def _eval_f_at(knot: KnotSpec, n: int, N: int, bits: int,
               root: Optional[_RootData] = None) -> "mp.mpc":
    if knot.name == "4_1":
        return f41_eval(n, N, bits, root)
    poly = f_poly_exact(knot, n)
    use_bits = max(bits, 64 + _coeff_magnitude_bits(poly))
    return eval_root_of_unity(poly, N, use_bits)


# ---------------------------------------------------------------------------
# Periodicity of f_n(zeta_n)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodicityReport:
    period: Optional[int]          # None when aperiodic on the window
    phase: Optional[int]           # first index where the period locks in
    values: Tuple[float, ...]      # one period of values (sorted multiset)
    message: str = ""


def periodicity_check(knot, n_max: int, bits: int = DEFAULT_BITS,
                      tol: float = 1e-9) -> PeriodicityReport:
    """Detect the minimal period of the real sequence f_n(zeta_n)."""
    K = _resolve_knot(knot)
    vals: List[float] = []
    for n in range(1, n_max + 1):
        v = _eval_f_at(K, n, n, bits)
        if abs(mp.im(v)) > tol:
            raise AsymptoticsError(
                "f_%d(zeta_%d) has imaginary part %s beyond tolerance"
                % (n, n, mp.nstr(mp.im(v)))
            )
        vals.append(float(mp.re(v)))
    for d in range(1, n_max // 2 + 1):
        if all(abs(vals[i + d] - vals[i]) <= tol
               for i in range(n_max - d)):
            one = tuple(sorted(vals[:d]))
            return PeriodicityReport(d, 1, one)
    return PeriodicityReport(None, None, (), "aperiodic on window")


# ---------------------------------------------------------------------------
# Richardson extrapolation and volume growth
# ---------------------------------------------------------------------------


def richardson(seq: Sequence[Tuple[int, float]], order: int):
    """Order-step Richardson extrapolation of a sequence with an expansion
    in 1/n.  ``seq`` is a list of (n, value) pairs with distinct n; returns
    the corner of the Neville table (polynomial extrapolation in h = 1/n
    to h = 0)."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    if len(seq) < order + 1:
        raise ExtrapolationError("need at least order+1 points")
    pts = sorted(seq, key=lambda t: t[0])[-(order + 1):]
    hs = [mp.mpf(1) / n for n, _ in pts]
    tab = [mp.mpf(v) if not isinstance(v, mp.mpc) else v for _, v in pts]
    for m in range(1, order + 1):
        tab = [
            (hs[i] * tab[i + 1] - hs[i + m] * tab[i]) / (hs[i] - hs[i + m])
            for i in range(len(tab) - 1)
        ]
    return tab[0]


def vol_41(bits: int = DEFAULT_BITS):
    """Hyperbolic volume of the figure-eight complement,
    2 * Im Li_2(e^{i*pi/3})."""
    with mp.workprec(bits):
        return 2 * mp.im(mp.polylog(2, mp.expjpi(mp.mpf(1) / 3)))


@dataclass(frozen=True)
class GrowthResult:
    estimate: float
    order: int
    flagged: bool                  # True when residuals were non-monotone
    raw: Tuple[Tuple[int, float], ...] = ()


def growth_rate(knot, n_list: Sequence[int], bits: int = DEFAULT_BITS,
                order: int = 4) -> GrowthResult:
    """Richardson-accelerated limit of (pi/n) log|f_n(zeta_{2n})|."""
    K = _resolve_knot(knot)
    n_list = sorted(set(n_list))
    if not n_list:
        raise ValueError("n_list must be nonempty")
    seq = []
    with mp.workprec(bits):
        for n in n_list:
            v = _eval_f_at(K, n, 2 * n, bits)
            m = abs(v)
            g = mp.pi / n * mp.log(m) if m != 0 else mp.mpf(0)
            seq.append((n, g))
    order = min(order, len(seq) - 1)
    est = richardson(seq, order)
    # instability flag: successive-order corners should settle monotonically
    corners = [richardson(seq, o) for o in range(order + 1)]
    resid = [abs(corners[i + 1] - corners[i]) for i in range(len(corners) - 1)]
    flagged = any(resid[i + 1] > resid[i] * 10 for i in range(len(resid) - 1))
    return GrowthResult(float(est), order, flagged,
                        tuple((n, float(g)) for n, g in seq))


# ---------------------------------------------------------------------------
# Perturbative series: exact data, formal operations, extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PerturbSeries:
    """Phi(h) = prefactor * sum_k c_k u^k / k!, u = h/(72*sqrt(-3))."""

    coeffs: tuple                  # c_0, c_1, ... (Fractions when exact)
    prefactor: str = "1"
    exact: bool = True

    @property
    def depth(self) -> int:
        return len(self.coeffs) - 1

    def a_coeffs(self) -> tuple:
        """Plain power-series coefficients a_k = c_k / k!."""
        return tuple(Fraction(c) / math.factorial(k)
                     for k, c in enumerate(self.coeffs))


PHI_J = PerturbSeries(
    (Fraction(1), Fraction(11), Fraction(697), Fraction(724351, 5)),
    prefactor="3^(-1/4)",
)

PHI_F = PerturbSeries(
    (
        Fraction(1),
        Fraction(4),
        Fraction(304),
        Fraction(290912, 5),
        Fraction(107155712, 5),
        Fraction(91298182144, 7),
        Fraction(416634955237376, 35),
        Fraction(76199853915803648, 5),
    ),
    prefactor="3^(-1/2)",
)

QUOTIENT_TABLE_PREFIX = (1, 9, 513, 109593)


def _require_unit(s: PerturbSeries):
    if not s.exact or s.coeffs[0] != 1:
        raise AsymptoticsError("series must be exact with c_0 = 1")


def series_mul(s: PerturbSeries, t: PerturbSeries,
               prefactor: str = "1") -> PerturbSeries:
    """Formal product in the c-convention, to the shorter depth."""
    _require_unit(s)
    _require_unit(t)
    depth = min(s.depth, t.depth)
    sa, ta = s.a_coeffs(), t.a_coeffs()
    out = []
    for k in range(depth + 1):
        out.append(sum(sa[i] * ta[k - i] for i in range(k + 1)))
    coeffs = tuple(a * math.factorial(k) for k, a in enumerate(out))
    return PerturbSeries(coeffs, prefactor)


def series_sqrt_inv(s: PerturbSeries, prefactor: str = "1") -> PerturbSeries:
    """Formal s^{-1/2} in the c-convention (requires c_0 = 1)."""
    _require_unit(s)
    sa = s.a_coeffs()
    # t = s^{-1/2}  <=>  t^2 * s = 1; recurse on plain coefficients
    ta = [Fraction(1)]
    for k in range(1, s.depth + 1):
        # coefficient of u^k in t^2*s must vanish:
        # 2*t_k + sum_{i+j+l=k, i,j<k} t_i t_j s_l = 0
        acc = Fraction(0)
        for i in range(k + 1):
            for j in range(k - i + 1):
                if i == k or j == k:
                    continue
                acc += ta[i] * ta[j] * sa[k - i - j]
        ta.append(-acc / 2)
    coeffs = tuple(a * math.factorial(k) for k, a in enumerate(ta))
    return PerturbSeries(coeffs, prefactor)


def phi_quotient_check(depth: int) -> tuple:
    """Exact c-coefficients of Phi^J / sqrt(Phi^F); all must be integers."""
    if depth > PHI_J.depth:
        raise ValueError("only %d published coefficients" % (PHI_J.depth + 1))
    j = PerturbSeries(PHI_J.coeffs[: depth + 1], PHI_J.prefactor)
    f = PerturbSeries(PHI_F.coeffs[: depth + 1], PHI_F.prefactor)
    quot = series_mul(j, series_sqrt_inv(f))
    out = []
    for c in quot.coeffs:
        if c.denominator != 1:
            raise IntegralityError("non-integer quotient coefficient %s" % c)
        out.append(int(c))
    return tuple(out)


def extract_phi(knot, depth: int, n_max: int,
                bits: int = 512, nodes: Optional[int] = None) -> PerturbSeries:
    """Numerical c_0..c_depth of Phi^F from the normalized sequence
    f_n(zeta_{2n}) * e^{-n*vol/pi} * sqrt(3), fitted as a polynomial in
    u = pi/(36*sqrt(3)*n) on the largest available n (Vandermonde solve
    with guard coefficients beyond ``depth``)."""
    K = _resolve_knot(knot)
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    guard = 4
    m = (depth + 1 + guard) if nodes is None else nodes
    if n_max < m + 2:
        raise ValueError("n_max too small for %d nodes" % m)
    step = max(1, n_max // (4 * m))
    ns = [n_max - i * step for i in range(m)]
    with mp.workprec(bits):
        vol = vol_41(bits)
        sqrt3 = mp.sqrt(3)
        u0 = mp.pi / (36 * sqrt3)
        rows, rhs = [], []
        for n in ns:
            v = _eval_f_at(K, n, 2 * n, bits)
            s = mp.re(v) * mp.e ** (-n * vol / mp.pi) * sqrt3
            u = u0 / n
            rows.append([u ** k for k in range(m)])
            rhs.append(s)
        sol = mp.lu_solve(mp.matrix(rows), mp.matrix(rhs))
        coeffs = tuple(float(sol[k] * math.factorial(k))
                       for k in range(depth + 1))
    return PerturbSeries(coeffs, prefactor="3^(-1/2)", exact=False)


# ---------------------------------------------------------------------------
# CSV emitter
# ---------------------------------------------------------------------------


def emit_csv(stream, knot, n_max: int, bits: int = DEFAULT_BITS,
             doubled: bool = True):
    """Write rows ``n, re, im, modulus, normalized`` for external plotting.

    ``doubled`` selects evaluation at zeta_{2n} (volume-growth mode) vs
    zeta_n (periodicity mode); ``normalized`` is the value scaled by
    e^{-n*vol/pi} * sqrt(3) in the doubled mode and the raw real part
    otherwise.
    """
    import csv as _csv

    K = _resolve_knot(knot)
    writer = _csv.writer(stream)
    writer.writerow(["n", "re", "im", "modulus", "normalized"])
    with mp.workprec(bits):
        vol = vol_41(bits)
        sqrt3 = mp.sqrt(3)
        for n in range(1, n_max + 1):
            v = _eval_f_at(K, n, 2 * n if doubled else n, bits)
            if doubled:
                norm = mp.re(v) * mp.e ** (-n * vol / mp.pi) * sqrt3
            else:
                norm = mp.re(v)
            writer.writerow([n, mp.nstr(mp.re(v), 17), mp.nstr(mp.im(v), 17),
                             mp.nstr(abs(v), 17), mp.nstr(norm, 17)])
