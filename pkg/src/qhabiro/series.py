"""Exact and truncated Laurent series in q with a rational exponent grid.

A :class:`QSeries` stores integer coefficients on the grid (1/scale)*Z.
Exponents are kept as integers in units of 1/scale; ``prec`` is an
exclusive bound in the same units (the series is known for exponents
< prec/scale), or ``None`` for an exact Laurent polynomial.

All values are immutable; every operation returns a fresh series.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Iterator, Optional, Union

try:
    import gmpy2

    _mpz = gmpy2.mpz
except ImportError:  # pragma: no cover - gmpy2 is an optional speedup
    _mpz = None

INF = math.inf

ExpLike = Union[int, Fraction]


class QAlgebraError(Exception):
    """Base class for algebra-level failures."""


class NotInvertibleError(QAlgebraError):
    """Leading coefficient is not a unit over the integers."""


class DegreeBoundError(QAlgebraError):
    """A summand violated its declared degree lower bound."""


class ExactnessError(QAlgebraError):
    """Operation requires an exact Laurent polynomial."""


class RemainderError(QAlgebraError):
    """Exact division left a nonzero remainder."""


class PrecisionError(QAlgebraError):
    """Requested precision cannot be certified."""


# ---------------------------------------------------------------------------
# multiplication kernel
#
# Schoolbook convolution for small operands.  Large products are folded
# into one big-integer multiplication (Kronecker substitution), which GMP
# handles asymptotically fast.  Swap `_polymul` to change the kernel.
# ---------------------------------------------------------------------------

_KRONECKER_CUTOFF = 4096  # len(a)*len(b) above which packing pays off


def _polymul_school(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    if len(a) > len(b):
        a, b = b, a
    lb = len(b)
    for i, ca in enumerate(a):
        if not ca:
            continue
        out[i : i + lb] = [x + ca * y for x, y in zip(out[i : i + lb], b)]
    return out


def _pack_signed(coeffs: list, width: int) -> int:
    pos = bytearray(len(coeffs) * width)
    neg = bytearray(len(coeffs) * width)
    for i, c in enumerate(coeffs):
        if c > 0:
            pos[i * width : i * width + width] = c.to_bytes(width, "little")
        elif c < 0:
            neg[i * width : i * width + width] = (-c).to_bytes(width, "little")
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _polymul_kronecker(a: list, b: list) -> list:
    # bits(|c_a * c_b| * overlap) <= bits(a) + bits(b) + bits(overlap)
    ba = max(map(int.bit_length, a))
    bb = max(map(int.bit_length, b))
    bound_bits = ba + bb + min(len(a), len(b)).bit_length()
    width = (bound_bits + 9) // 8  # 8*width >= bound_bits+2
    n = len(a) + len(b) - 1
    if _mpz is not None:
        bits = 8 * width
        x = gmpy2.pack([c if c > 0 else 0 for c in a], bits) \
            - gmpy2.pack([-c if c < 0 else 0 for c in a], bits)
        y = gmpy2.pack([c if c > 0 else 0 for c in b], bits) \
            - gmpy2.pack([-c if c < 0 else 0 for c in b], bits)
        half = 1 << (bits - 1)
        offset = gmpy2.pack([half] * n, bits)
        data = gmpy2.unpack(x * y + offset, bits)
        return [int(c) - half for c in data]
    x = _pack_signed(a, width)
    y = _pack_signed(b, width)
    z = x * y
    half = 1 << (8 * width - 1)
    offset = int.from_bytes(half.to_bytes(width, "little") * n, "little")
    data = (z + offset).to_bytes(n * width, "little")
    return [
        int.from_bytes(data[k * width : (k + 1) * width], "little") - half
        for k in range(n)
    ]


def _polymul(a: list, b: list) -> list:
    if not a or not b:
        return []
    if len(a) * len(b) <= _KRONECKER_CUTOFF:
        return _polymul_school(a, b)
    return _polymul_kronecker(a, b)


# ---------------------------------------------------------------------------
# QSeries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeltaAtLeast:
    """Marker: the series vanishes up to its precision, so only a lower
    bound on the valuation is known."""

    bound: Fraction

    def __ge__(self, other):
        return NotImplemented


class QSeries:
    __slots__ = ("scale", "offset", "coeffs", "prec")

    def __init__(self, coeffs=(), offset: int = 0, scale: int = 1, prec: Optional[int] = None):
        """Build a series from raw data in units of 1/scale, canonicalizing.

        ``coeffs[i]`` is the coefficient of q^((offset+i)/scale); ``prec``
        is exclusive, in units of 1/scale, or None for an exact polynomial.
        """
        if scale < 1:
            raise ValueError("scale must be a positive integer")
        coeffs = list(coeffs)
        if prec is not None:
            # drop unauthoritative coefficients at/above prec
            keep = prec - offset
            if keep < len(coeffs):
                coeffs = coeffs[: max(keep, 0)]
        lo = 0
        while lo < len(coeffs) and coeffs[lo] == 0:
            lo += 1
        hi = len(coeffs)
        while hi > lo and coeffs[hi - 1] == 0:
            hi -= 1
        coeffs = coeffs[lo:hi]
        offset = offset + lo if coeffs else 0
        # normalize the exponent grid
        g = scale
        for i, c in enumerate(coeffs):
            if c:
                g = gcd(g, offset + i)
                if g == 1:
                    break
        if prec is not None:
            g = gcd(g, prec)
        if g > 1:
            if coeffs:
                step = [coeffs[i] for i in range(0, len(coeffs), g)]
                # only reducible if intermediate slots are empty
                if sum(1 for c in coeffs if c) == sum(1 for c in step if c):
                    coeffs, offset, scale = step, offset // g, scale // g
                    if prec is not None:
                        prec = prec // g
            else:
                scale //= g
                if prec is not None:
                    prec //= g
        self_set = super().__setattr__
        self_set("scale", scale)
        self_set("offset", offset)
        self_set("coeffs", tuple(coeffs))
        self_set("prec", prec)

    def __setattr__(self, *a):  # immutability
        raise AttributeError("QSeries is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(prec: Optional[ExpLike] = None) -> "QSeries":
        if prec is None:
            return QSeries()
        num, den = _as_ratio(prec)
        return QSeries((), 0, den, num)

    @staticmethod
    def one() -> "QSeries":
        return QSeries((1,))

    @staticmethod
    def monomial(exp: ExpLike = 1, coeff: int = 1) -> "QSeries":
        num, den = _as_ratio(exp)
        return QSeries((coeff,), num, den)

    @staticmethod
    def from_terms(terms, prec: Optional[ExpLike] = None) -> "QSeries":
        """terms: mapping or iterable of (exponent, coefficient) pairs."""
        items = list(terms.items()) if hasattr(terms, "items") else list(terms)
        den = 1
        for e, _ in items:
            den = lcm(den, _as_ratio(e)[1])
        if prec is not None:
            den = lcm(den, _as_ratio(prec)[1])
        acc = {}
        for e, c in items:
            n, d = _as_ratio(e)
            acc[n * (den // d)] = acc.get(n * (den // d), 0) + c
        if not acc:
            return QSeries.zero(prec)
        lo = min(acc)
        hi = max(acc)
        coeffs = [acc.get(i, 0) for i in range(lo, hi + 1)]
        p = None
        if prec is not None:
            n, d = _as_ratio(prec)
            p = n * (den // d)
        return QSeries(coeffs, lo, den, p)

    # -- basic queries -----------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.prec is None

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def prec_q(self) -> Optional[Fraction]:
        """Precision as a q-exponent, or None when exact."""
        if self.prec is None:
            return None
        return Fraction(self.prec, self.scale)

    def delta(self):
        """Minimal q-exponent of a nonzero coefficient.

        Returns a Fraction for a nonzero series, ``math.inf`` for the exact
        zero series, and a :class:`DeltaAtLeast` marker for a truncated
        series that vanishes up to its precision.
        """
        if self.coeffs:
            return Fraction(self.offset, self.scale)
        if self.prec is None:
            return INF
        return DeltaAtLeast(Fraction(self.prec, self.scale))

    def delta_lb(self) -> Union[Fraction, float]:
        """Certified lower bound on the valuation (inf for exact zero)."""
        d = self.delta()
        return d.bound if isinstance(d, DeltaAtLeast) else d

    def top_exponent(self) -> Fraction:
        if not self.coeffs:
            raise ValueError("zero series has no top exponent")
        return Fraction(self.offset + len(self.coeffs) - 1, self.scale)

    def coeff(self, exp: ExpLike) -> int:
        """Coefficient of q^exp. Raises PrecisionError beyond prec."""
        n, d = _as_ratio(exp)
        if self.prec is not None and Fraction(n, d) >= self.prec_q:
            raise PrecisionError(f"coefficient of q^{Fraction(n,d)} is beyond precision")
        num = self.scale * n
        if num % d:
            return 0
        i = num // d - self.offset
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def terms(self) -> Iterator[tuple]:
        """Yield (exponent: Fraction, coefficient) for nonzero terms."""
        for i, c in enumerate(self.coeffs):
            if c:
                yield Fraction(self.offset + i, self.scale), c

    # -- arithmetic --------------------------------------------------------

    def _rescaled(self, scale: int) -> tuple:
        """(offset, coeffs list, prec) on the finer grid `scale`."""
        f = scale // self.scale
        if f == 1:
            return self.offset, list(self.coeffs), self.prec
        coeffs = [0] * (len(self.coeffs) * f - (f - 1)) if self.coeffs else []
        for i, c in enumerate(self.coeffs):
            coeffs[i * f] = c
        prec = None if self.prec is None else self.prec * f
        return self.offset * f, coeffs, prec

    def __add__(self, other) -> "QSeries":
        if isinstance(other, int):
            other = QSeries((other,))
        if not isinstance(other, QSeries):
            return NotImplemented
        s = lcm(self.scale, other.scale)
        ao, ac, ap = self._rescaled(s)
        bo, bc, bp = other._rescaled(s)
        prec = _min_prec(ap, bp)
        if not ac:
            return QSeries(bc, bo, s, prec)
        if not bc:
            return QSeries(ac, ao, s, prec)
        lo = min(ao, bo)
        hi = max(ao + len(ac), bo + len(bc))
        out = [0] * (hi - lo)
        out[ao - lo : ao - lo + len(ac)] = ac
        for i, c in enumerate(bc):
            out[bo - lo + i] += c
        return QSeries(out, lo, s, prec)

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries([-c for c in self.coeffs], self.offset, self.scale, self.prec)

    def __sub__(self, other) -> "QSeries":
        if isinstance(other, int):
            other = QSeries((other,))
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "QSeries":
        return (-self) + other

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, int):
            return QSeries(
                [other * c for c in self.coeffs], self.offset, self.scale, self.prec
            )
        if not isinstance(other, QSeries):
            return NotImplemented
        s = lcm(self.scale, other.scale)
        ao, ac, ap = self._rescaled(s)
        bo, bc, bp = other._rescaled(s)
        # pessimistic truncation: prec_a + delta(b) against prec_b + delta(a)
        prec = None
        da = ao if ac else (ap if ap is not None else None)  # lower bound, units 1/s
        db = bo if bc else (bp if bp is not None else None)
        cands = []
        if ap is not None:
            if db is None:  # other is exact zero
                return QSeries.zero()
            cands.append(ap + db)
        if bp is not None:
            if da is None:
                return QSeries.zero()
            cands.append(bp + da)
        if cands:
            prec = min(cands)
        if not ac or not bc:
            return QSeries((), 0, s, prec)
        return QSeries(_polymul(ac, bc), ao + bo, s, prec)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QSeries":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = QSeries.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def shift(self, exp: ExpLike) -> "QSeries":
        """Multiply by the monomial q^exp."""
        n, d = _as_ratio(exp)
        s = lcm(self.scale, d)
        o, c, p = self._rescaled(s)
        k = n * (s // d)
        return QSeries(c, o + k, s, None if p is None else p + k)

    def truncate(self, prec: ExpLike) -> "QSeries":
        """Restrict knowledge to exponents < prec (a q-exponent)."""
        n, d = _as_ratio(prec)
        s = lcm(self.scale, d)
        o, c, p = self._rescaled(s)
        newp = n * (s // d)
        if p is not None:
            newp = min(newp, p)
        return QSeries(c, o, s, newp)

    def subst_qpow(self, m: int) -> "QSeries":
        """Substitute q -> q^m (m a positive integer)."""
        if m < 1:
            raise ValueError("m must be a positive integer")
        if not self.coeffs:
            return QSeries((), 0, self.scale, None if self.prec is None else self.prec * m)
        coeffs = [0] * ((len(self.coeffs) - 1) * m + 1)
        for i, c in enumerate(self.coeffs):
            coeffs[i * m] = c
        prec = None if self.prec is None else self.prec * m
        return QSeries(coeffs, self.offset * m, self.scale, prec)

    def mirror(self) -> "QSeries":
        """q -> q^{-1}; defined only for exact Laurent polynomials."""
        if self.prec is not None:
            raise ExactnessError("mirror requires exact polynomial")
        return QSeries(
            list(reversed(self.coeffs)),
            -(self.offset + len(self.coeffs) - 1) if self.coeffs else 0,
            self.scale,
        )

    # -- comparison / hashing ---------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return (
            self.scale == other.scale
            and self.offset == other.offset
            and self.coeffs == other.coeffs
            and self.prec == other.prec
        )

    def __hash__(self) -> int:
        return hash((self.scale, self.offset, self.coeffs, self.prec))

    # -- rendering ---------------------------------------------------------

    def __str__(self) -> str:
        parts = []
        for e, c in self.terms():
            parts.append(_fmt_term(e, c, first=not parts))
        if self.prec is not None:
            parts.append(("+ " if parts else "") + f"O(q^{_fmt_exp(self.prec_q)})")
        if not parts:
            return "0"
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"QSeries({self})"

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "scale": self.scale,
            "offset": self.offset,
            "coeffs": [str(c) for c in self.coeffs],
            "prec": "exact" if self.prec is None else self.prec,
        }

    @staticmethod
    def from_json(obj) -> "QSeries":
        if isinstance(obj, str):
            obj = json.loads(obj)
        prec = obj.get("prec", "exact")
        return QSeries(
            [int(c) for c in obj["coeffs"]],
            int(obj["offset"]),
            int(obj["scale"]),
            None if prec == "exact" else int(prec),
        )


def _as_ratio(x: ExpLike) -> tuple:
    if isinstance(x, int):
        return x, 1
    f = Fraction(x)
    return f.numerator, f.denominator


def _min_prec(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _fmt_exp(e: Fraction) -> str:
    return str(e.numerator) if e.denominator == 1 else f"({e})"


def _fmt_term(e: Fraction, c: int, first: bool) -> str:
    sign = "-" if c < 0 else "+"
    mag = abs(c)
    if e == 0:
        body = str(mag)
    else:
        q = "q" if e == 1 else f"q^{_fmt_exp(e)}"
        body = q if mag == 1 else f"{mag}*{q}"
    if first:
        return body if c > 0 else f"-{body}"
    return f"{sign} {body}"


# ---------------------------------------------------------------------------
# spec-level operations
# ---------------------------------------------------------------------------


def series_add(a: QSeries, b: QSeries) -> QSeries:
    return a + b


def series_sum(terms) -> QSeries:
    """Sum of many series with one accumulator allocation, avoiding the
    per-addition canonicalization of repeated ``+``."""
    terms = list(terms)
    if not terms:
        return QSeries.zero()
    s = 1
    for t in terms:
        s = lcm(s, t.scale)
    prec = None
    datas = []
    for t in terms:
        o, c, p = t._rescaled(s)
        prec = _min_prec(prec, p)
        if c:
            datas.append((o, c))
    if not datas:
        return QSeries((), 0, s, prec)
    lo = min(o for o, _ in datas)
    hi = max(o + len(c) for o, c in datas)
    out = [0] * (hi - lo)
    for o, c in datas:
        i0 = o - lo
        i1 = i0 + len(c)
        out[i0:i1] = [x + y for x, y in zip(out[i0:i1], c)]
    return QSeries(out, lo, s, prec)


_PACK_CACHE: dict = {}
_PACK_CACHE_LIMIT = 4096
_PACK_CACHE_MIN_LEN = 32  # only cache operands long enough to be worth it


def _packed_signed_mpz(coeffs: tuple, stride: int, bits: int):
    """coeffs spread onto every stride-th slot, packed as a signed mpz.

    Long operands (the reusable ones: cached binomials, factorials) are
    memoized; short ones are cheap to pack on the fly.
    """
    key = (coeffs, stride, bits)
    cached = len(coeffs) >= _PACK_CACHE_MIN_LEN
    if cached:
        try:
            return _PACK_CACHE[key]
        except KeyError:
            pass
    n = (len(coeffs) - 1) * stride + 1
    pos = [0] * n
    neg = [0] * n
    for i, c in enumerate(coeffs):
        if c > 0:
            pos[i * stride] = c
        elif c < 0:
            neg[i * stride] = -c
    val = gmpy2.pack(pos, bits) - gmpy2.pack(neg, bits)
    if cached and len(_PACK_CACHE) < _PACK_CACHE_LIMIT:
        _PACK_CACHE[key] = val
    return val


def series_dot(pairs) -> QSeries:
    """sum(x * y for x, y in pairs) as one fused operation.

    For exact operands the products and the sum are carried out on packed
    big integers (one limb array per series), which is much faster than
    materializing each intermediate product.  Truncated operands fall back
    to the generic product-then-sum path with its usual prec propagation.
    """
    pairs = list(pairs)
    if _mpz is None or any(x.prec is not None or y.prec is not None for x, y in pairs):
        return series_sum(x * y for x, y in pairs)
    items = [(x, y) for x, y in pairs if x.coeffs and y.coeffs]
    if not items:
        return QSeries.zero()
    s = 1
    for x, y in items:
        s = lcm(s, lcm(x.scale, y.scale))
    max_bits = 0
    overlap = 0
    spans = []
    for x, y in items:
        fx = s // x.scale
        fy = s // y.scale
        bx = max(map(int.bit_length, x.coeffs))
        by = max(map(int.bit_length, y.coeffs))
        max_bits = max(max_bits, bx + by)
        overlap += min(len(x.coeffs), len(y.coeffs))
        o = x.offset * fx + y.offset * fy
        spans.append((o, o + (len(x.coeffs) - 1) * fx + (len(y.coeffs) - 1) * fy + 1))
    bits = 64
    need = max_bits + overlap.bit_length() + 2
    while bits < need:
        bits *= 2
    if bits > 1024:  # coefficients too large for fixed-slot packing
        return series_sum(x * y for x, y in pairs)
    lo = min(o for o, _ in spans)
    hi = max(h for _, h in spans)
    acc = _mpz(0)
    for x, y in items:
        fx = s // x.scale
        fy = s // y.scale
        px = _packed_signed_mpz(x.coeffs, fx, bits)
        py = _packed_signed_mpz(y.coeffs, fy, bits)
        acc += (px * py) << ((x.offset * fx + y.offset * fy - lo) * bits)
    n = hi - lo
    half = 1 << (bits - 1)
    acc += gmpy2.pack([half] * n, bits)
    out = [int(c) - half for c in gmpy2.unpack(acc, bits)]
    return QSeries(out, lo, s)


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    return a * b


def series_delta(a: QSeries):
    return a.delta()


def series_subst_qpow(a: QSeries, m: int) -> QSeries:
    return a.subst_qpow(m)


def series_mirror(a: QSeries) -> QSeries:
    return a.mirror()


def series_invert_unit(a: QSeries, prec: ExpLike) -> QSeries:
    """Inverse of a series with unit (+-1) leading coefficient, to O(q^prec).

    The leading monomial is factored out, so any nonzero exact or
    truncated series with lowest coefficient +-1 is accepted.
    """
    if a.is_zero:
        raise NotInvertibleError("cannot invert zero series")
    lead = a.coeffs[0]
    if lead not in (1, -1):
        raise NotInvertibleError("not invertible over integers")
    n, d = _as_ratio(prec)
    s = lcm(a.scale, d)
    ao, ac, ap = a._rescaled(s)
    want = n * (s // d)  # target prec in units 1/s
    # b = q^{-d(a)} * w with u*w = 1; need w to exponent < want - (-d) ...
    m = want - ao  # unit-part length needed so that a*b is known below want
    if ap is not None:
        m = min(m, ap - ao)
    if m <= 0:
        return QSeries.zero(Fraction(want, s) - 2 * Fraction(ao, s))
    u = list(ac[:m]) + [0] * max(0, m - len(ac))
    w = [0] * m
    w[0] = lead  # 1/lead == lead for +-1
    for i in range(1, m):
        acc = 0
        for j in range(1, min(i, len(u) - 1) + 1):
            if u[j]:
                acc += u[j] * w[i - j]
        w[i] = -lead * acc
    return QSeries(w, -ao, s, m - ao)


def exact_div(a: QSeries, b: QSeries) -> QSeries:
    """Exact Laurent-polynomial division a/b; raises on nonzero remainder."""
    if not (a.is_exact and b.is_exact):
        raise ExactnessError("exact_div requires exact inputs")
    if b.is_zero:
        raise ZeroDivisionError("division by zero series")
    if a.is_zero:
        return QSeries()
    s = lcm(a.scale, b.scale)
    ao, ac, _ = a._rescaled(s)
    bo, bc, _ = b._rescaled(s)
    lead = bc[0]
    n = len(ac) - len(bc) + 1
    if n < 1:
        raise RemainderError("division leaves a remainder")
    rem = list(ac)
    quo = [0] * n
    for i in range(n):
        c = rem[i]
        if c == 0:
            continue
        if c % lead:
            raise RemainderError("division leaves a remainder")
        f = c // lead
        quo[i] = f
        for j, bcj in enumerate(bc):
            if bcj:
                rem[i + j] -= f * bcj
    if any(rem):
        raise RemainderError("division leaves a remainder")
    return QSeries(quo, ao - bo, s)


@dataclass(frozen=True)
class DegreeBound:
    """Lower bound k -> delta of the k-th summand, nondecreasing for
    k >= monotone_from (spot-checked during summation)."""

    bound: Callable[[int], ExpLike]
    monotone_from: int = 0


def series_sum_bounded(
    terms: Callable[[int], QSeries], bound: DegreeBound, prec: ExpLike
) -> QSeries:
    """Sum terms(0) + terms(1) + ... truncated at O(q^prec).

    Stops at the first k >= bound.monotone_from with bound(k) >= prec.
    Each included term must satisfy delta(term) >= bound(k).
    """
    target = Fraction(prec)
    acc = QSeries.zero(target)
    k = 0
    prev = None
    while True:
        bk = Fraction(bound.bound(k))
        if k >= bound.monotone_from:
            if prev is not None and bk < prev:
                raise DegreeBoundError(
                    f"declared bound is not monotone at k={k}"
                )
            prev = bk
            if bk >= target:
                break
        t = terms(k)
        if t.delta_lb() < bk:
            raise DegreeBoundError(f"degree bound violated at k={k}")
        acc = (acc + t).truncate(target)
        k += 1
    return acc.truncate(target)
