"""Directed-rounding interval and complex-rectangle arithmetic.

Endpoint (inf/sup) representation at configurable binary precision.  The
endpoint primitives come from mpmath's libmp layer, whose functions take
explicit precision and rounding arguments; every operation rounds outward,
so each result encloses the exact image of its input sets.  Values are
immutable and all operations are pure.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

from mpmath.libmp import (
    finf,
    fnan,
    fninf,
    fone,
    from_float,
    from_int,
    from_man_exp,
    from_rational,
    from_str,
    fzero,
    mpf_abs,
    mpf_add,
    mpf_eq,
    mpf_ge,
    mpf_gt,
    mpf_le,
    mpf_lt,
    mpf_neg,
    mpf_shift,
    mpf_sub,
    to_float,
    to_str,
)
from mpmath.libmp.libmpi import (
    mpi_abs,
    mpi_add,
    mpi_atan,
    mpi_atan2,
    mpi_cos,
    mpi_div,
    mpi_exp,
    mpi_log,
    mpi_mid,
    mpi_mul,
    mpi_neg,
    mpi_pi,
    mpi_pow_int,
    mpi_sin,
    mpi_sqrt,
    mpi_square,
    mpi_sub,
    mpi_tan,
)

__all__ = [
    "Precision",
    "RealInterval",
    "ComplexBox",
    "DivisionByZeroInterval",
    "EmptyIntersection",
    "DomainError",
    "BranchCutOverlap",
    "get_precision",
    "set_precision",
    "precision",
    "iv",
    "iv_pm",
    "cbox",
    "pi_interval",
    "exp",
    "log",
    "sqrt",
    "sin",
    "cos",
    "tan",
    "atan",
    "atan2",
    "pow_real",
    "hull",
    "interval_sum",
    "zero",
    "one",
]


class DivisionByZeroInterval(ZeroDivisionError):
    """Divisor interval contains zero."""


class EmptyIntersection(ArithmeticError):
    """Intersection of disjoint intervals was requested."""


class DomainError(ArithmeticError):
    """Interval argument leaves the function's real domain."""


class BranchCutOverlap(ArithmeticError):
    """A complex box overlaps the branch cut of a multivalued function."""


@dataclass(frozen=True)
class Precision:
    """Global numeric configuration: working significand width plus the
    default subdivision and tolerance budget used by adaptive algorithms."""

    significand_bits: int = 128
    max_subdivisions: int = 4096
    tolerance: float = 1e-10

    def __post_init__(self):
        if self.significand_bits < 53:
            raise ValueError("significand_bits must be at least 53")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


_CURRENT = Precision()


def get_precision() -> Precision:
    return _CURRENT


def set_precision(p) -> Precision:
    """Install a new global Precision (an int sets significand_bits only)."""
    global _CURRENT
    if isinstance(p, int):
        p = Precision(
            significand_bits=p,
            max_subdivisions=_CURRENT.max_subdivisions,
            tolerance=_CURRENT.tolerance,
        )
    if not isinstance(p, Precision):
        raise TypeError(f"expected Precision or int, got {type(p).__name__}")
    old = _CURRENT
    _CURRENT = p
    return old


@contextmanager
def precision(p):
    old = set_precision(p)
    try:
        yield _CURRENT
    finally:
        set_precision(old)


def _prec() -> int:
    return _CURRENT.significand_bits


def _widen_pair(pair, prec, k):
    """Push endpoints outward by k last-place units.

    The backing transcendental kernels deliver directed rounding only to
    within a fraction of an ulp (observed up to ~0.2 ulp on exp at large
    arguments), so every transcendental result gets this safety margin.
    Both endpoints move by the same step, sized from the larger-magnitude
    endpoint, which keeps widening compatible with nested inputs.
    Exact-zero and infinite endpoints are left alone: the kernels produce
    them only when they are exact.
    """
    a, b = pair
    ea = a[2] + a[3] if a[1] else None
    eb = b[2] + b[3] if b[1] else None
    if ea is None and eb is None:
        return pair
    e = ea if eb is None else eb if ea is None else max(ea, eb)
    step = from_man_exp(k, e - prec)
    if a[1] or a == fzero:
        a = mpf_sub(a, step, prec, "f")
    if b[1] or b == fzero:
        b = mpf_add(b, step, prec, "c")
    return a, b


def _to_raw_pair(x, prec):
    """Convert a scalar to a (lo, hi) pair of raw mpf endpoints.

    int/float/raw-mpf convert exactly; str and Fraction round outward at the
    working precision, so decimal strings always produce enclosures.
    """
    if isinstance(x, RealInterval):
        return x.a, x.b
    if isinstance(x, bool):
        raise TypeError("bool is not a valid interval endpoint")
    if isinstance(x, int):
        v = from_int(x)
        return v, v
    if isinstance(x, float):
        if x != x:
            raise ValueError("NaN endpoint forbidden")
        v = from_float(x)
        return v, v
    if isinstance(x, str):
        return from_str(x, prec, "f"), from_str(x, prec, "c")
    if isinstance(x, Fraction):
        return (
            from_rational(x.numerator, x.denominator, prec, "f"),
            from_rational(x.numerator, x.denominator, prec, "c"),
        )
    if isinstance(x, tuple) and len(x) == 4:
        return x, x
    raise TypeError(f"cannot build interval endpoint from {type(x).__name__}")


class RealInterval:
    """Closed real interval [a, b] with raw mpf endpoints, a <= b."""

    __slots__ = ("a", "b")

    def __init__(self, lo, hi=None):
        prec = _prec()
        a, a2 = _to_raw_pair(lo, prec)
        if hi is None:
            b = a2
        else:
            b2, b = _to_raw_pair(hi, prec)
        if a == fnan or b == fnan:
            raise ValueError("NaN endpoint forbidden")
        if not mpf_le(a, b):
            raise ValueError(f"lower endpoint exceeds upper: {to_str(a, 20)} > {to_str(b, 20)}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("RealInterval is immutable")

    @classmethod
    def _raw(cls, pair):
        self = object.__new__(cls)
        object.__setattr__(self, "a", pair[0])
        object.__setattr__(self, "b", pair[1])
        return self

    @property
    def _pair(self):
        return (self.a, self.b)

    # -- queries ---------------------------------------------------------

    def lo_float(self) -> float:
        return to_float(self.a, rnd="f")

    def hi_float(self) -> float:
        return to_float(self.b, rnd="c")

    def mid(self) -> "RealInterval":
        """Exact point interval at (a+b)/2, clamped into [a, b]."""
        m = mpi_mid(self._pair, _prec())
        if mpf_lt(m, self.a):
            m = self.a
        elif mpf_gt(m, self.b):
            m = self.b
        return RealInterval._raw((m, m))

    def mid_float(self) -> float:
        return to_float(mpi_mid(self._pair, 53))

    def rad(self) -> "RealInterval":
        """Point interval bounding the radius (b-a)/2 from above."""
        prec = _prec()
        d = mpf_sub(self.b, self.a, prec, "c")
        r = mpf_shift(d, -1)
        return RealInterval._raw((r, r))

    def rad_float(self) -> float:
        return to_float(mpf_shift(mpf_sub(self.b, self.a, 53, "c"), -1), rnd="c")

    def width(self) -> "RealInterval":
        d = mpf_sub(self.b, self.a, _prec(), "c")
        return RealInterval._raw((d, d))

    def width_float(self) -> float:
        return to_float(mpf_sub(self.b, self.a, 53, "c"), rnd="c")

    def is_point(self) -> bool:
        return mpf_eq(self.a, self.b)

    def is_finite(self) -> bool:
        return self.a not in (finf, fninf) and self.b not in (finf, fninf)

    def contains_zero(self) -> bool:
        return mpf_le(self.a, fzero) and mpf_ge(self.b, fzero)

    def is_positive(self) -> bool:
        """Strictly positive everywhere."""
        return mpf_gt(self.a, fzero)

    def is_negative(self) -> bool:
        return mpf_lt(self.b, fzero)

    def is_nonnegative(self) -> bool:
        return mpf_ge(self.a, fzero)

    def contains(self, other) -> bool:
        if not isinstance(other, RealInterval):
            other = RealInterval(other)
        return mpf_le(self.a, other.a) and mpf_ge(self.b, other.b)

    def overlaps(self, other) -> bool:
        if not isinstance(other, RealInterval):
            other = RealInterval(other)
        return mpf_le(self.a, other.b) and mpf_le(other.a, self.b)

    def strictly_less(self, other) -> bool:
        """Every point of self is below every point of other."""
        if not isinstance(other, RealInterval):
            other = RealInterval(other)
        return mpf_lt(self.b, other.a)

    def strictly_greater(self, other) -> bool:
        if not isinstance(other, RealInterval):
            other = RealInterval(other)
        return mpf_gt(self.a, other.b)

    def inflate(self, k_ulps: int = 1) -> "RealInterval":
        """Widen by k last-place units (at working precision) on each side."""
        return RealInterval._raw(_widen_pair(self._pair, _prec(), k_ulps))

    def mag(self) -> "RealInterval":
        """Point interval at max(|a|, |b|) (an upper bound for |x| on self)."""
        m = mpf_abs(self.a)
        n = mpf_abs(self.b)
        return RealInterval._raw((m, m)) if mpf_ge(m, n) else RealInterval._raw((n, n))

    def mig(self) -> "RealInterval":
        """Point interval at min |x| over self (0 if the interval straddles 0)."""
        if self.contains_zero():
            return RealInterval._raw((fzero, fzero))
        m = mpf_abs(self.a)
        n = mpf_abs(self.b)
        return RealInterval._raw((m, m)) if mpf_le(m, n) else RealInterval._raw((n, n))

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RealInterval):
            return other
        if isinstance(other, (int, float, str, Fraction)):
            return RealInterval(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RealInterval._raw(mpi_add(self._pair, o._pair, _prec()))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RealInterval._raw(mpi_sub(self._pair, o._pair, _prec()))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RealInterval._raw(mpi_sub(o._pair, self._pair, _prec()))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RealInterval._raw(mpi_mul(self._pair, o._pair, _prec()))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.contains_zero():
            raise DivisionByZeroInterval(f"divisor {o} contains zero")
        return RealInterval._raw(mpi_div(self._pair, o._pair, _prec()))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__truediv__(self)

    def __neg__(self):
        return RealInterval._raw(mpi_neg(self._pair, _prec()))

    def __pos__(self):
        return self

    def __abs__(self):
        return RealInterval._raw(mpi_abs(self._pair, _prec()))

    def __pow__(self, n):
        if isinstance(n, int):
            return self.pow_int(n)
        o = self._coerce(n)
        if o is None:
            return NotImplemented
        return pow_real(self, o)

    def pow_int(self, n: int) -> "RealInterval":
        if not isinstance(n, int):
            raise TypeError("pow_int requires an integer exponent")
        if n < 0 and self.contains_zero():
            raise DivisionByZeroInterval(f"negative power of {self} containing zero")
        return RealInterval._raw(mpi_pow_int(self._pair, n, _prec()))

    def square(self) -> "RealInterval":
        return RealInterval._raw(mpi_square(self._pair, _prec()))

    # -- set operations --------------------------------------------------

    def hull(self, other) -> "RealInterval":
        if not isinstance(other, RealInterval):
            other = RealInterval(other)
        a = self.a if mpf_le(self.a, other.a) else other.a
        b = self.b if mpf_ge(self.b, other.b) else other.b
        return RealInterval._raw((a, b))

    def intersect(self, other) -> "RealInterval":
        if not isinstance(other, RealInterval):
            other = RealInterval(other)
        a = self.a if mpf_ge(self.a, other.a) else other.a
        b = self.b if mpf_le(self.b, other.b) else other.b
        if not mpf_le(a, b):
            raise EmptyIntersection(f"{self} and {other} are disjoint")
        return RealInterval._raw((a, b))

    def bisect(self):
        """Split at the midpoint into two covering halves.

        Raises ValueError when the interval is too thin to split (the
        midpoint coincides with an endpoint at working precision).
        """
        if not mpf_lt(self.a, self.b):
            raise ValueError("bisect requires lo < hi")
        m = self.mid().a
        if mpf_eq(m, self.a) or mpf_eq(m, self.b):
            raise ValueError("interval too thin to bisect at working precision")
        return RealInterval._raw((self.a, m)), RealInterval._raw((m, self.b))

    def split(self, k: int):
        """Cover by k pieces with equal-ish dyadic cuts (k >= 1)."""
        if k <= 1:
            return [self]
        prec = _prec()
        cuts = [self.a]
        d = mpf_sub(self.b, self.a, prec, "n")
        for i in range(1, k):
            # proportional cut: a + i*d/k rounded to nearest, then clamped
            c = mpf_add(self.a, _mul_frac(d, i, k, prec), prec, "n")
            if mpf_lt(c, cuts[-1]):
                c = cuts[-1]
            if mpf_gt(c, self.b):
                c = self.b
            cuts.append(c)
        cuts.append(self.b)
        out = []
        for lo_, hi_ in zip(cuts[:-1], cuts[1:]):
            if mpf_le(lo_, hi_):
                out.append(RealInterval._raw((lo_, hi_)))
        return out

    # -- formatting ------------------------------------------------------

    def __repr__(self):
        return f"[{to_str(self.a, 24)}, {to_str(self.b, 24)}]"

    def to_str(self, dps=24) -> str:
        return f"[{to_str(self.a, dps)}, {to_str(self.b, dps)}]"

    def __eq__(self, other):
        if not isinstance(other, RealInterval):
            return NotImplemented
        return mpf_eq(self.a, other.a) and mpf_eq(self.b, other.b)

    def __hash__(self):
        return hash((self.a, self.b))


def _mul_frac(d, i, k, prec):
    """d * i / k rounded to nearest at prec (cut placement only)."""
    from mpmath.libmp import mpf_div, mpf_mul_int

    return mpf_div(mpf_mul_int(d, i, prec, "n"), from_int(k), prec, "n")


# -- constructors and free functions -------------------------------------


def iv(lo, hi=None) -> RealInterval:
    """Shorthand interval constructor."""
    return RealInterval(lo, hi)


def iv_pm(center, radius) -> RealInterval:
    """Interval center +/- radius with outward rounding (strings welcome)."""
    c = RealInterval(center)
    r = RealInterval(radius)
    return RealInterval._raw(((c - r).a, (c + r).b))


def zero() -> RealInterval:
    return RealInterval._raw((fzero, fzero))


def one() -> RealInterval:
    return RealInterval._raw((fone, fone))


def pi_interval() -> RealInterval:
    prec = _prec()
    return RealInterval._raw(_widen_pair(mpi_pi(prec), prec, 2))


def hull(items) -> RealInterval:
    items = list(items)
    if not items:
        raise ValueError("hull of empty sequence")
    out = items[0] if isinstance(items[0], RealInterval) else RealInterval(items[0])
    for x in items[1:]:
        out = out.hull(x)
    return out


def interval_sum(items) -> RealInterval:
    """Sum in the given (fixed) order, for reproducible accumulation."""
    total = zero()
    for x in items:
        total = total + x
    return total


def exp(x: RealInterval) -> RealInterval:
    prec = _prec()
    a, b = _widen_pair(mpi_exp(x._pair, prec), prec, 4)
    if mpf_lt(a, fzero):
        a = fzero
    return RealInterval._raw((a, b))


def log(x: RealInterval, clip: bool = False) -> RealInterval:
    """Natural log; requires x >= 0 (lo = 0 gives a -inf lower endpoint).

    With clip=True a partially negative interval is clipped to [0, hi]
    first; the default is a DomainError.
    """
    if mpf_lt(x.a, fzero):
        if not clip:
            raise DomainError(f"log of interval {x} with negative part")
        if mpf_lt(x.b, fzero):
            raise DomainError(f"log of negative interval {x}")
        x = RealInterval._raw((fzero, x.b))
    if x.b == fzero:
        raise DomainError("log of the zero interval")
    prec = _prec()
    if x.a == fzero:
        pair = _widen_pair(mpi_log((x.b, x.b), prec), prec, 4)
        return RealInterval._raw((fninf, pair[1]))
    return RealInterval._raw(_widen_pair(mpi_log(x._pair, prec), prec, 4))


def sqrt(x: RealInterval, clip: bool = False) -> RealInterval:
    if mpf_lt(x.a, fzero):
        if not clip:
            raise DomainError(f"sqrt of interval {x} with negative part")
        if mpf_lt(x.b, fzero):
            raise DomainError(f"sqrt of negative interval {x}")
        x = RealInterval._raw((fzero, x.b))
    prec = _prec()
    pair = _widen_pair(mpi_sqrt(x._pair, prec), prec, 1)
    if x.is_nonnegative() and mpf_lt(pair[0], fzero):
        pair = (fzero, pair[1])
    return RealInterval._raw(pair)


_FNEG_ONE = mpf_neg(fone)


def _clamp_unit(pair):
    a, b = pair
    if mpf_lt(a, _FNEG_ONE):
        a = _FNEG_ONE
    if mpf_gt(b, fone):
        b = fone
    return a, b


def sin(x: RealInterval) -> RealInterval:
    prec = _prec()
    return RealInterval._raw(_clamp_unit(_widen_pair(mpi_sin(x._pair, prec), prec, 4)))


def cos(x: RealInterval) -> RealInterval:
    prec = _prec()
    return RealInterval._raw(_clamp_unit(_widen_pair(mpi_cos(x._pair, prec), prec, 4)))


def tan(x: RealInterval) -> RealInterval:
    prec = _prec()
    return RealInterval._raw(_widen_pair(mpi_tan(x._pair, prec), prec, 4))


def atan(x: RealInterval) -> RealInterval:
    prec = _prec()
    return RealInterval._raw(_widen_pair(mpi_atan(x._pair, prec), prec, 4))


def atan2(y: RealInterval, x: RealInterval) -> RealInterval:
    """Interval atan2; on boxes straddling the negative real axis the raw
    primitive hulls to [-pi, pi], callers needing branch control must use
    ComplexBox.arg."""
    prec = _prec()
    return RealInterval._raw(_widen_pair(mpi_atan2(y._pair, x._pair, prec), prec, 8))


def pow_real(x: RealInterval, y) -> RealInterval:
    """x**y for real interval exponent, via exp(y log x); requires x > 0."""
    if not isinstance(y, RealInterval):
        y = RealInterval(y)
    if not x.is_positive():
        raise DomainError(f"pow_real requires a strictly positive base, got {x}")
    return exp(y * log(x))


# -- complex rectangles ---------------------------------------------------


def _check_branch_side(branch_side):
    if branch_side not in (None, "upper", "lower"):
        raise ValueError(f"branch_side must be None, 'upper' or 'lower', got {branch_side!r}")


class ComplexBox:
    """Axis-aligned rectangle {x + iy : x in re, y in im}."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        if not isinstance(re, RealInterval):
            re = RealInterval(re)
        if not isinstance(im, RealInterval):
            im = RealInterval(im)
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexBox is immutable")

    @classmethod
    def _make(cls, re, im):
        self = object.__new__(cls)
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)
        return self

    # -- queries ---------------------------------------------------------

    def conj(self) -> "ComplexBox":
        im = self.im
        return ComplexBox._make(self.re, RealInterval._raw((mpf_neg(im.b), mpf_neg(im.a))))

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def contains(self, other) -> bool:
        other = _as_cbox(other)
        return self.re.contains(other.re) and self.im.contains(other.im)

    def overlaps(self, other) -> bool:
        other = _as_cbox(other)
        return self.re.overlaps(other.re) and self.im.overlaps(other.im)

    def is_real(self) -> bool:
        return self.im.a == fzero and self.im.b == fzero

    def mid(self) -> "ComplexBox":
        return ComplexBox._make(self.re.mid(), self.im.mid())

    def mid_complex(self) -> complex:
        return complex(self.re.mid_float(), self.im.mid_float())

    def rad_float(self) -> float:
        return max(self.re.rad_float(), self.im.rad_float())

    def width_float(self) -> float:
        return max(self.re.width_float(), self.im.width_float())

    def hull(self, other) -> "ComplexBox":
        other = _as_cbox(other)
        return ComplexBox._make(self.re.hull(other.re), self.im.hull(other.im))

    def abs(self) -> RealInterval:
        """Enclosure of |z| over the box."""
        s = self.re.square() + self.im.square()
        return sqrt(s)

    def abs_squared(self) -> RealInterval:
        return self.re.square() + self.im.square()

    def touches_negative_axis(self) -> bool:
        """True when the box meets {x <= 0, y = 0}, the log branch cut."""
        return self.im.contains_zero() and mpf_le(self.re.a, fzero)

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        o = _as_cbox_or_none(other)
        if o is None:
            return NotImplemented
        return ComplexBox._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_cbox_or_none(other)
        if o is None:
            return NotImplemented
        return ComplexBox._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _as_cbox_or_none(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, RealInterval) or isinstance(other, (int, float, str, Fraction)):
            r = RealInterval(other) if not isinstance(other, RealInterval) else other
            return ComplexBox._make(self.re * r, self.im * r)
        o = _as_cbox_or_none(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self.re, self.im, o.re, o.im
        return ComplexBox._make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, RealInterval) or isinstance(other, (int, float, str, Fraction)):
            r = RealInterval(other) if not isinstance(other, RealInterval) else other
            return ComplexBox._make(self.re / r, self.im / r)
        o = _as_cbox_or_none(other)
        if o is None:
            return NotImplemented
        den = o.abs_squared()
        if den.contains_zero():
            raise DivisionByZeroInterval(f"divisor box {o} contains zero")
        num = self * o.conj()
        return ComplexBox._make(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        o = _as_cbox_or_none(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return ComplexBox._make(-self.re, -self.im)

    def __pow__(self, n):
        if isinstance(n, int):
            return self.pow_int(n)
        return NotImplemented

    def pow_int(self, n: int) -> "ComplexBox":
        """Integer power by binary splitting; single-valued, cut-safe."""
        if not isinstance(n, int):
            raise TypeError("pow_int requires an integer exponent")
        if n == 0:
            return ComplexBox._make(one(), zero())
        if n < 0:
            return ComplexBox._make(one(), zero()) / self.pow_int(-n)
        result = None
        base = self
        k = n
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- transcendental --------------------------------------------------

    def exp(self) -> "ComplexBox":
        r = exp(self.re)
        return ComplexBox._make(r * cos(self.im), r * sin(self.im))

    def arg(self, branch_side=None) -> RealInterval:
        """Argument enclosure (principal branch away from the cut).

        Any contact with the branch cut {x <= 0, y = 0} raises
        BranchCutOverlap unless branch_side tells which half-plane the
        values are analytically continued from: 'upper' keeps the result
        near +pi (the y < 0 portion is shifted by +2*pi), 'lower' mirrors
        this towards -pi.
        """
        _check_branch_side(branch_side)
        if self.contains_zero():
            raise DomainError("argument of a box containing zero")
        if not self.touches_negative_axis():
            return atan2(self.im, self.re)
        if branch_side is None:
            raise BranchCutOverlap(f"box {self} meets the negative real axis")
        # A cut-touching box free of zero has re < 0 strictly.  Split at
        # im = 0; evaluate the lower part through its mirror image so both
        # halves use atan2 on upper-contact boxes only, where the raw
        # primitive is tight, with the on-axis edge at +pi.
        im = self.im
        two_pi = pi_interval() * 2
        parts = []
        if mpf_ge(im.b, fzero):
            up = RealInterval._raw((im.a if mpf_gt(im.a, fzero) else fzero, im.b))
            a_up = atan2(up, self.re)
            parts.append(a_up if branch_side == "upper" else a_up - two_pi)
        if mpf_le(im.a, fzero):
            mirror = RealInterval._raw(
                (mpf_neg(im.b) if mpf_lt(im.b, fzero) else fzero, mpf_neg(im.a))
            )
            a_dn = -atan2(mirror, self.re)
            parts.append(a_dn if branch_side == "lower" else a_dn + two_pi)
        return hull(parts)

    def log(self, branch_side=None) -> "ComplexBox":
        """Principal-branch log enclosure; see arg for branch_side."""
        a = self.abs()
        if a.contains_zero():
            raise DomainError(f"log of box {self} containing zero in modulus")
        return ComplexBox._make(log(a), self.arg(branch_side))

    def sqrt(self, branch_side=None) -> "ComplexBox":
        return self.pow_real(Fraction(1, 2), branch_side)

    def pow_real(self, y, branch_side=None) -> "ComplexBox":
        """Principal z**y for real interval y, via exp(y log z)."""
        if not isinstance(y, RealInterval):
            y = RealInterval(y)
        return (self.log(branch_side) * y).exp()

    # -- formatting ------------------------------------------------------

    def __repr__(self):
        return f"({self.re!r} + {self.im!r} i)"

    def __eq__(self, other):
        if not isinstance(other, ComplexBox):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))


def _as_cbox(x) -> ComplexBox:
    c = _as_cbox_or_none(x)
    if c is None:
        raise TypeError(f"cannot interpret {type(x).__name__} as ComplexBox")
    return c


def _as_cbox_or_none(x):
    if isinstance(x, ComplexBox):
        return x
    if isinstance(x, RealInterval):
        return ComplexBox._make(x, zero())
    if isinstance(x, complex):
        return ComplexBox(RealInterval(x.real), RealInterval(x.imag))
    if isinstance(x, (int, float, str, Fraction)):
        return ComplexBox._make(RealInterval(x), zero())
    return None


def cbox(re, im=0) -> ComplexBox:
    """Shorthand complex box constructor."""
    if isinstance(re, ComplexBox):
        return re
    if isinstance(re, complex):
        return ComplexBox(RealInterval(re.real), RealInterval(re.imag))
    return ComplexBox(re, im)
