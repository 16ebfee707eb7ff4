"""Jet arithmetic and Taylor models with rigorous remainder.

A Jet is a truncated power series with interval (or complex-box)
coefficients; elementary functions act on jets through exact coefficient
recurrences, so a jet evaluated at an interval encloses all derivatives of
the underlying function there.  A TaylorModel pairs a polynomial with
interval coefficients and a remainder box Delta such that

    f(nu) - p(nu - c) = delta * (nu - c)^(n+1)   for some delta in Delta

holds for every nu in the model's domain.  The relative (factored-power)
form is what keeps remainders meaningful on domains reaching the center,
where an additive remainder would have to absorb the full polynomial tail.
Additive uncertainty therefore always goes into the constant coefficient,
never into Delta.
"""

from __future__ import annotations

from fractions import Fraction

from polyspec.interval import (
    ComplexBox,
    DivisionByZeroInterval,
    DomainError,
    RealInterval,
    atan,
    cbox,
    cos,
    exp,
    iv,
    log,
    pi_interval,
    pow_real,
    sin,
    sqrt,
    zero,
)

__all__ = [
    "Jet",
    "TaylorModel",
    "IncompatibleModels",
    "DivisorContainsZero",
    "RangeOutsideDomain",
    "RangePassesThroughZero",
    "SignConditionUnverifiable",
    "QuadratureFailure",
    "jet_exp",
    "jet_log",
    "jet_sqrt",
    "jet_pow",
    "jet_reciprocal",
    "jet_sin_cos",
    "jet_atan",
    "compose_series",
    "tm_constant",
    "tm_identity",
    "tm_from_function",
    "tm_compose",
    "tm_abs",
    "tm_FN",
]


class IncompatibleModels(ValueError):
    """Operands differ in center, domain, or degree."""


class DivisorContainsZero(ArithmeticError):
    """Division by a jet or model whose value range meets zero."""


class RangeOutsideDomain(ArithmeticError):
    """A composed model's range leaves the outer function's domain."""


class RangePassesThroughZero(ArithmeticError):
    """tm_abs requires the modulus bounded away from zero."""


class SignConditionUnverifiable(ArithmeticError):
    """A required sign-constancy condition could not be established."""


class QuadratureFailure(ArithmeticError):
    """A remainder integral could not be bounded to the requested quality."""


# -- scalar helpers (RealInterval / ComplexBox dispatch) -------------------


def _is_cbox(x):
    return isinstance(x, ComplexBox)


def _zero_like(x):
    return ComplexBox(zero(), zero()) if _is_cbox(x) else zero()


def _one_like(x):
    return ComplexBox(iv(1), zero()) if _is_cbox(x) else iv(1)


def _as_scalar(x):
    if isinstance(x, (RealInterval, ComplexBox)):
        return x
    if isinstance(x, complex):
        return ComplexBox(iv(x.real), iv(x.imag))
    return iv(x)


def _s_exp(x):
    return x.exp() if _is_cbox(x) else exp(x)


def _s_log(x, branch_side=None):
    if _is_cbox(x):
        return x.log(branch_side)
    return log(x)


def _s_pow(x, a, branch_side=None):
    if _is_cbox(x):
        return x.pow_real(a, branch_side)
    return pow_real(x, a)


def _contains_zero(x):
    return x.contains_zero()


# -- jets -------------------------------------------------------------------


class Jet:
    """Power series truncated at a fixed degree, coefficientwise enclosures.

    Constructed around a point to get derivative enclosures there, or
    around a whole interval to get Lagrange-form derivative bounds over it.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = tuple(_as_scalar(c) for c in coeffs)
        if not coeffs:
            raise ValueError("jet needs at least the constant coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("Jet is immutable")

    @classmethod
    def constant(cls, value, degree):
        value = _as_scalar(value)
        z = _zero_like(value)
        return cls((value,) + (z,) * degree)

    @classmethod
    def variable(cls, value, degree):
        """The identity function as a jet at (or over) `value`."""
        value = _as_scalar(value)
        if degree == 0:
            return cls((value,))
        z = _zero_like(value)
        return cls((value, _one_like(value)) + (z,) * (degree - 1))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def _compat(self, other):
        if isinstance(other, Jet):
            if other.degree != self.degree:
                raise IncompatibleModels(
                    f"jet degrees differ: {self.degree} vs {other.degree}"
                )
            return other
        return Jet.constant(other, self.degree)

    def __add__(self, other):
        o = self._compat(other)
        return Jet(a + b for a, b in zip(self.coeffs, o.coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._compat(other)
        return Jet(a - b for a, b in zip(self.coeffs, o.coeffs))

    def __rsub__(self, other):
        return self._compat(other) - self

    def __neg__(self):
        return Jet(-a for a in self.coeffs)

    def __mul__(self, other):
        o = self._compat(other)
        n = self.degree
        out = []
        for k in range(n + 1):
            acc = self.coeffs[0] * o.coeffs[k]
            for j in range(1, k + 1):
                acc = acc + self.coeffs[j] * o.coeffs[k - j]
            out.append(acc)
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._compat(other)
        if _contains_zero(o.coeffs[0]):
            raise DivisorContainsZero(f"jet divisor constant term {o.coeffs[0]} meets zero")
        n = self.degree
        f = []
        for k in range(n + 1):
            acc = self.coeffs[k]
            for j in range(k):
                acc = acc - f[j] * o.coeffs[k - j]
            f.append(acc / o.coeffs[0])
        return Jet(f)

    def __rtruediv__(self, other):
        return self._compat(other) / self

    def evaluate(self, dt):
        """Horner evaluation at displacement dt from the jet's base point."""
        dt = _as_scalar(dt)
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * dt + c
        return acc

    def truncated(self, degree):
        """Series truncation (drops coefficients; no remainder bookkeeping)."""
        if degree >= self.degree:
            return self
        return Jet(self.coeffs[: degree + 1])

    def derivative(self):
        if self.degree == 0:
            return Jet((_zero_like(self.coeffs[0]),))
        return Jet(self.coeffs[k] * k for k in range(1, self.degree + 1))

    def antiderivative(self, constant=0):
        out = [_as_scalar(constant)]
        for k, c in enumerate(self.coeffs):
            out.append(c / iv(k + 1))
        return Jet(out)

    def __repr__(self):
        return f"Jet(degree={self.degree}, c0={self.coeffs[0]!r})"


def jet_exp(u: Jet) -> Jet:
    f = [_s_exp(u.coeffs[0])]
    for k in range(1, u.degree + 1):
        acc = u.coeffs[1] * f[k - 1]
        for j in range(2, k + 1):
            acc = acc + (u.coeffs[j] * j) * f[k - j]
        f.append(acc / iv(k))
    return Jet(f)


def jet_log(u: Jet, branch_side=None) -> Jet:
    if _contains_zero(u.coeffs[0]):
        raise DomainError(f"log jet at constant term {u.coeffs[0]} meeting zero")
    f = [_s_log(u.coeffs[0], branch_side)]
    for k in range(1, u.degree + 1):
        acc = u.coeffs[k] * k
        for j in range(1, k):
            acc = acc - (f[j] * j) * u.coeffs[k - j]
        f.append(acc / iv(k) / u.coeffs[0])
    return Jet(f)


def jet_pow(u: Jet, alpha, branch_side=None) -> Jet:
    """u**alpha for a real (interval) exponent."""
    if not isinstance(alpha, RealInterval):
        alpha = iv(alpha)
    if _contains_zero(u.coeffs[0]):
        raise DivisorContainsZero(f"pow jet at constant term {u.coeffs[0]} meeting zero")
    f = [_s_pow(u.coeffs[0], alpha, branch_side)]
    for k in range(1, u.degree + 1):
        acc = _zero_like(f[0])
        for j in range(k):
            w = alpha * (k - j) - iv(j)
            acc = acc + w * u.coeffs[k - j] * f[j]
        f.append(acc / iv(k) / u.coeffs[0])
    return Jet(f)


def jet_sqrt(u: Jet, branch_side=None) -> Jet:
    return jet_pow(u, iv(Fraction(1, 2)), branch_side)


def jet_reciprocal(u: Jet) -> Jet:
    return Jet.constant(_one_like(u.coeffs[0]), u.degree) / u


def jet_sin_cos(u: Jet):
    if _is_cbox(u.coeffs[0]):
        raise DomainError("sin/cos jets support real coefficients only")
    s = [sin(u.coeffs[0])]
    c = [cos(u.coeffs[0])]
    for k in range(1, u.degree + 1):
        sa = u.coeffs[1] * c[k - 1]
        ca = u.coeffs[1] * s[k - 1]
        for j in range(2, k + 1):
            sa = sa + (u.coeffs[j] * j) * c[k - j]
            ca = ca + (u.coeffs[j] * j) * s[k - j]
        s.append(sa / iv(k))
        c.append(-ca / iv(k))
    return Jet(s), Jet(c)


def jet_atan(u: Jet) -> Jet:
    if _is_cbox(u.coeffs[0]):
        raise DomainError("atan jets support real coefficients only")
    f = [atan(u.coeffs[0])]
    if u.degree == 0:
        return Jet(f)
    one = Jet.constant(1, u.degree - 1)
    du = Jet(u.coeffs[k] * k for k in range(1, u.degree + 1))
    usq = (u * u).truncated(u.degree - 1)
    g = du / (one + usq)
    for k in range(1, u.degree + 1):
        f.append(g.coeffs[k - 1] / iv(k))
    return Jet(f)


def compose_series(g: Jet, u: Jet) -> Jet:
    """Series of g(u(t)) where u has exactly-zero constant term."""
    c0 = u.coeffs[0]
    ok = (
        c0.re.is_point() and c0.im.is_point() and not c0.re.lo_float() and not c0.im.lo_float()
        if _is_cbox(c0)
        else c0.is_point() and not c0.lo_float()
    )
    if not ok:
        raise ValueError("compose_series requires an exactly-zero inner constant term")
    if g.degree != u.degree:
        raise IncompatibleModels("compose_series requires matching degrees")
    acc = Jet.constant(g.coeffs[-1], u.degree)
    for c in reversed(g.coeffs[:-1]):
        acc = acc * u + Jet.constant(c, u.degree)
    return acc


# -- Taylor models ------------------------------------------------------------


def _poly_eval(coeffs, x):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


class TaylorModel:
    """Polynomial enclosure with relative-error remainder on a real domain."""

    __slots__ = ("center", "domain", "coeffs", "remainder")

    def __init__(self, center, domain, coeffs, remainder):
        center = _as_scalar(center)
        if _is_cbox(center) or not center.is_point():
            raise ValueError("center must be a real point")
        if not isinstance(domain, RealInterval) or not domain.is_finite():
            raise ValueError("domain must be a finite RealInterval")
        if not domain.contains(center):
            # the integral-form remainder argument integrates along the
            # segment from the center, which must stay inside the domain
            raise ValueError("center must lie in the domain")
        coeffs = tuple(_as_scalar(c) for c in coeffs)
        if not coeffs:
            raise ValueError("model needs at least the constant coefficient")
        remainder = _as_scalar(remainder)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "remainder", remainder)

    def __setattr__(self, name, value):
        raise AttributeError("TaylorModel is immutable")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_real(self):
        reals = all(not _is_cbox(c) for c in self.coeffs)
        return reals and not _is_cbox(self.remainder)

    def _offset_domain(self):
        return self.domain - self.center

    def _compat(self, other):
        if not isinstance(other, TaylorModel):
            return tm_constant(other, self.domain, self.degree, self.center)
        if (
            other.center != self.center
            or other.domain != self.domain
            or other.degree != self.degree
        ):
            raise IncompatibleModels(
                "models must share center, domain, and degree "
                f"(got degrees {self.degree}/{other.degree})"
            )
        return other

    # -- evaluation ------------------------------------------------------

    def evaluate(self, nu):
        """Enclosure of f(nu); nu may be a point or a sub-interval."""
        nu = _as_scalar(nu)
        dt = nu - self.center
        return _poly_eval(self.coeffs, dt) + self.remainder * dt.pow_int(self.degree + 1)

    def range(self):
        return self.evaluate(self.domain)

    def polynomial_range(self):
        return _poly_eval(self.coeffs, self._offset_domain())

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        o = self._compat(other)
        return TaylorModel(
            self.center,
            self.domain,
            (a + b for a, b in zip(self.coeffs, o.coeffs)),
            self.remainder + o.remainder,
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = self._compat(other)
        return TaylorModel(
            self.center,
            self.domain,
            (a - b for a, b in zip(self.coeffs, o.coeffs)),
            self.remainder - o.remainder,
        )

    def __rsub__(self, other):
        return self._compat(other) - self

    def __neg__(self):
        return TaylorModel(
            self.center, self.domain, (-a for a in self.coeffs), -self.remainder
        )

    def __mul__(self, other):
        o = self._compat(other)
        n = self.degree
        om = self._offset_domain()
        kept = []
        for k in range(n + 1):
            acc = self.coeffs[0] * o.coeffs[k]
            for j in range(1, k + 1):
                acc = acc + self.coeffs[j] * o.coeffs[k - j]
            kept.append(acc)
        # coefficients of the exact product beyond degree n fold into the
        # remainder with weight (nu-c)^(k-n-1)
        extra = None
        for k in range(n + 1, 2 * n + 1):
            acc = None
            for j in range(k - n, n + 1):
                term = self.coeffs[j] * o.coeffs[k - j]
                acc = term if acc is None else acc + term
            w = acc * om.pow_int(k - n - 1)
            extra = w if extra is None else extra + w
        pa = _poly_eval(self.coeffs, om)
        pb = _poly_eval(o.coeffs, om)
        rem = self.remainder * pb + o.remainder * pa
        rem = rem + self.remainder * o.remainder * om.pow_int(n + 1)
        if extra is not None:
            rem = rem + extra
        return TaylorModel(self.center, self.domain, kept, rem)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._compat(other)
        if not o.is_real:
            raise IncompatibleModels("division by a complex model is unsupported")
        rng = o.range()
        if _contains_zero(rng):
            raise DivisorContainsZero(f"divisor model range {rng} meets zero")
        return self * tm_compose(_reciprocal_jetfn, o)

    def __rtruediv__(self, other):
        return self._compat(other) / self

    # -- structure -------------------------------------------------------

    def truncate(self, degree):
        """Lower the degree, folding dropped coefficients into the remainder."""
        if degree >= self.degree:
            return self
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        om = self._offset_domain()
        rem = self.remainder * om.pow_int(self.degree - degree)
        for k in range(self.degree, degree, -1):
            rem = rem + self.coeffs[k] * om.pow_int(k - degree - 1)
        return TaylorModel(self.center, self.domain, self.coeffs[: degree + 1], rem)

    def conj(self):
        return TaylorModel(
            self.center,
            self.domain,
            (c.conj() if _is_cbox(c) else c for c in self.coeffs),
            self.remainder.conj() if _is_cbox(self.remainder) else self.remainder,
        )

    def _real_projection(self):
        """Real-part model; sound only when the represented value is real,
        which the callers (|f|^2 products) guarantee."""
        return TaylorModel(
            self.center,
            self.domain,
            (c.re if _is_cbox(c) else c for c in self.coeffs),
            self.remainder.re if _is_cbox(self.remainder) else self.remainder,
        )

    def __repr__(self):
        return (
            f"TaylorModel(degree={self.degree}, domain={self.domain!r}, "
            f"c0={self.coeffs[0]!r}, rem={self.remainder!r})"
        )


# -- constructors -------------------------------------------------------------


def tm_constant(value, domain, degree, center=0) -> TaylorModel:
    value = _as_scalar(value)
    z = _zero_like(value)
    return TaylorModel(center, domain, (value,) + (z,) * degree, z)


def tm_identity(domain, degree, center=0) -> TaylorModel:
    if degree < 1:
        raise ValueError("identity model needs degree >= 1")
    c = _as_scalar(center)
    coeffs = [c, iv(1)] + [zero()] * (degree - 1)
    return TaylorModel(center, domain, coeffs, zero())


def tm_from_function(f, domain, degree, center=0, extra_degree=1) -> TaylorModel:
    """Model of f from its action on jets (Lagrange-form remainder).

    f must map a Jet to a Jet.  Coefficients come from the jet at the
    center point; the remainder is the top coefficient of a one-higher jet
    over the whole domain.  extra_degree > 0 computes that many degrees
    higher and truncates back, which usually tightens the remainder.
    """
    work = degree + extra_degree
    pj = f(Jet.variable(_as_scalar(center), work))
    lj = f(Jet.variable(domain, work + 1))
    model = TaylorModel(center, domain, pj.coeffs, lj.coeffs[-1])
    return model.truncate(degree)


def _reciprocal_jetfn(u: Jet) -> Jet:
    return jet_reciprocal(u)


def tm_compose(g, a: TaylorModel) -> TaylorModel:
    """Model of g(f) for g given by its action on jets; real models only.

    The mean-value form of the composition tail needs a real intermediate
    point, so complex models are rejected; their only composition use,
    |f| via sqrt, goes through tm_abs which real-projects first.  Range
    violations of g's domain surface as RangeOutsideDomain.
    """
    if not a.is_real:
        raise IncompatibleModels("tm_compose requires a real-valued model")
    n = a.degree
    rng = a.range()
    c0 = a.coeffs[0]
    xi = rng.hull(c0)
    try:
        g_point = g(Jet.variable(c0, n))
        g_range = g(Jet.variable(xi, n + 1))
    except (DomainError, DivisionByZeroInterval, DivisorContainsZero) as e:
        raise RangeOutsideDomain(f"model range {xi} leaves the outer domain: {e}") from None
    # Horner in the centered model U = a - c0 (constant term containing 0)
    u = a - tm_constant(c0, a.domain, n, a.center)
    acc = tm_constant(g_point.coeffs[n], a.domain, n, a.center)
    for k in range(n - 1, -1, -1):
        acc = acc * u + tm_constant(g_point.coeffs[k], a.domain, n, a.center)
    # mean-value tail: g^{(n+1)}(xi)/(n+1)! times U^{n+1}; U has zero true
    # constant term, so U^{n+1} = (q(nu)/nu + delta*nu^n)^{n+1} * nu^{n+1}
    om = a._offset_domain()
    if n >= 1:
        q_over_nu = _poly_eval(a.coeffs[1:], om)
    else:
        q_over_nu = _zero_like(c0)
    v = q_over_nu + a.remainder * om.pow_int(n)
    tail = g_range.coeffs[-1] * v.pow_int(n + 1)
    return TaylorModel(acc.center, acc.domain, acc.coeffs, acc.remainder + tail)


def tm_abs(a: TaylorModel) -> TaylorModel:
    """Model of |f| via sqrt(f * conj(f)); needs |f| bounded away from 0."""
    sq = (a * a.conj())._real_projection()
    rng = sq.range()
    if _contains_zero(rng) or rng.is_negative():
        raise RangePassesThroughZero(f"|f|^2 range {rng} reaches zero")
    return tm_compose(jet_sqrt, sq)


# -- Taylor model of the boundary hypergeometric factor -------------------------


def _fn_sixth_near_zero(z, nu, a, log_power_integrals):
    """Enclosure of the [0, a] piece of the sixth nu-derivative integral,
    uniform over the nu interval: each term's bounded part is factored
    against the sign-constant log^j(t) weights, with t^nu hulled by [0, 1]."""
    one = ComplexBox(iv(1), iv(0))
    ta = iv(0).hull(a)
    w = ComplexBox(ta, iv(0)) * z  # t z over [0, a]
    r = w.abs().mag()
    h = one + w / 2 + w * w / 3  # -log(1-w)/w, 3 terms + geometric tail
    tail = r.pow_int(3) / (1 - r)
    pad = iv(-1, 1) * tail.mag()
    h = h + ComplexBox(pad, pad)
    g2 = -z * h  # log(1-tz)/t
    lg = -ComplexBox(ta, iv(0)) * z * h  # log(1-tz)
    q = lg * (nu * -2)
    p_fac = q.exp()  # (1-tz)^{-2nu}
    # (e^q - 1)/q = 1 + q/2 + err, |err| <= |q|^2 e^{|q|} / 6
    qm = q.abs().mag()
    err = (qm * qm * exp(qm) / 6).mag()
    e_fac = one + q / 2 + ComplexBox(iv(-1, 1) * err, iv(-1, 1) * err)
    g1 = g2 * (nu * -2) * e_fac  # ((1-tz)^{-2nu} - 1)/t
    nl = lg * nu
    terms = (
        (6, g1 * nu),
        (5, (p_fac * g2 * (nu * 2) - g1) * -6),
        (4, (nl - 1) * p_fac * g2 * 60),
        (3, (nl * 2 - 3) * lg * p_fac * g2 * -80),
        (2, (nl - 2) * lg.pow_int(2) * p_fac * g2 * 240),
        (1, (nl * 2 - 5) * lg.pow_int(3) * p_fac * g2 * -96),
        (0, (nl - 3) * lg.pow_int(4) * p_fac * g2 * 64),
    )
    t_pow_nu = iv(0, 1)
    acc = ComplexBox(iv(0), iv(0))
    for j, factor in terms:
        weight = log_power_integrals("zero_to_a", m=j, a=a)
        acc = acc + factor * t_pow_nu * weight
    return acc


def _fn_sixth_family(z, nu, mode):
    """Integrand family for the middle piece of the sixth-derivative
    integral; the same factored expression serves boxes and jets.

    The integrand carries log(t)^j weights whose mass piles up at t = 0,
    and for z near 1 a matching pile of log(1-tz) powers at t = 1, so
    linear panels cascade at the endpoints.  The "log" mode integrates in
    u = log t (left half) and "log1m" in v = log(1-t) (right half, used
    when z meets 1); both turn the endpoint cascades into unit-scale
    features.  "linear" is the plain parametrization for a right half
    with no singularity."""
    from polyspec.quadrature import IntegrandFamily, guard_linear_off_negative_axis

    m2nu = nu * -2

    def assemble(lt, lg, p_fac, g1, g2, nl):
        acc = g1 * nu
        acc = acc * lt + (p_fac * g2 * (nu * 2) - g1) * -6
        acc = acc * lt + (nl - 1) * p_fac * g2 * 60
        acc = acc * lt + (nl * 2 - 3) * lg * p_fac * g2 * -80
        acc = acc * lt + (nl - 2) * lg * lg * p_fac * g2 * 240
        acc = acc * lt + (nl * 2 - 5) * lg * lg * lg * p_fac * g2 * -96
        acc = acc * lt + (nl - 3) * lg * lg * lg * lg * p_fac * g2 * 64
        return acc

    def core(t, lt, expm, logm):
        lg = logm(1 - t * z)
        p_fac = expm(lg * m2nu)
        g2 = lg / t
        g1 = (p_fac - 1) / t
        return assemble(lt, lg, p_fac, g1, g2, lg * nu)

    if mode == "linear":

        def evaluator(t):
            lt = t.log()
            return core(t, lt, lambda w: w.exp(), lambda w: w.log()) * (lt * nu).exp()

        def jet_evaluator(tj):
            lt = jet_log(tj)
            return core(tj, lt, jet_exp, jet_log) * jet_exp(lt * nu)

        guards = (guard_linear_off_negative_axis(z),)

    elif mode == "log":
        # t = e^u; log t is the coordinate itself and the Jacobian
        # joins t^nu as e^{(nu+1) u}

        def evaluator(u):
            t = u.exp()
            return core(t, u, lambda w: w.exp(), lambda w: w.log()) * (
                u * (nu + 1)
            ).exp()

        def jet_evaluator(uj):
            t = jet_exp(uj)
            return core(t, uj, jet_exp, jet_log) * jet_exp(uj * (nu + 1))

        def guard(u):
            return not (1 - u.exp() * z).touches_negative_axis()

        guards = (guard,)

    elif mode == "log1m":
        # t = 1 - e^v with Jacobian e^v; v stays below log(1/2) so
        # log t is tame

        def evaluator(v):
            s = v.exp()
            t = 1 - s
            lt = t.log()
            return (
                core(t, lt, lambda w: w.exp(), lambda w: w.log())
                * (lt * nu).exp()
                * s
            )

        def jet_evaluator(vj):
            s = jet_exp(vj)
            t = 1 - s
            lt = jet_log(t)
            return core(t, lt, jet_exp, jet_log) * jet_exp(lt * nu) * s

        def guard(v):
            t = 1 - v.exp()
            return t.re.is_positive() and not (1 - t * z).touches_negative_axis()

        guards = (guard,)

    else:
        raise ValueError(f"unknown mode {mode!r}")

    return IntegrandFamily(
        evaluator=evaluator,
        cut_guards=guards,
        jet_evaluator=jet_evaluator,
    )


def _fn_sixth_near_one(z, nu, b, N0, log_power_integrals):
    """Enclosure of the [b, 1] piece: factor everything except
    log^m(1-tz) (1-tz)^{-2nu} out of each term; those products keep the
    sign of their real and imaginary parts when m theta + 2 pi/N0 <= pi/2."""
    tb = b.hull(iv(1))
    c_sup = (1 - ComplexBox(tb, iv(0)) * z).abs().mag()
    if not c_sup.strictly_less(iv(1)):
        raise SignConditionUnverifiable(
            f"|1 - tz| reaches {c_sup} on [b, 1]; cannot bound below 1"
        )
    theta = atan(pi_interval() / log(c_sup).mag())
    half_pi = pi_interval() / 2
    worst = theta * 6 + pi_interval() * 2 / N0
    if not worst.strictly_less(half_pi):
        raise SignConditionUnverifiable(
            f"strengthened sign lemma needs m theta + 2 pi/N0 <= pi/2; "
            f"m=6 gives {worst}"
        )
    big_l = log(tb)  # log t on [b, 1]
    nl = nu * big_l
    t_pow = exp(big_l * (nu - 1))  # t^{nu - 1} on [b, 1]
    y = nu * -2
    ints = {
        m: log_power_integrals("one_sided_log_pow", m=m, b=b, z=z, y=y)
        for m in range(7)
    }
    acc = ints[6] * (t_pow * nu * 64)
    acc = acc + ints[5] * (t_pow * (nl + 1) * -192)
    acc = acc + ints[4] * (t_pow * (nl + 2) * big_l * 240)
    acc = acc + ints[3] * (t_pow * (nl + 3) * big_l.pow_int(2) * -160)
    acc = acc + ints[2] * (t_pow * (nl + 4) * big_l.pow_int(3) * 60)
    # the m = 0 term carries (1-tz)^{-2nu} - 1: split off the constant,
    # whose integral is enclosed by box times length
    u1 = t_pow * (nl + 5) * big_l.pow_int(4) * -12
    u0 = t_pow * (nl + 6) * big_l.pow_int(5)
    acc = acc + ints[1] * u1
    acc = acc + ints[0] * u0 - ComplexBox(u0 * (1 - b), iv(0))
    return acc


def tm_FN(
    z,
    N0: int,
    degree: int = 5,
    quad_tol: float = 1e-6,
    rem_tol: float = 2.0,
) -> TaylorModel:
    """Degree-5 model in nu = 1/N of the boundary hypergeometric factor
    F_{1/nu}(z) = 1 + nu * int_0^1 t^nu ((1-tz)^{-2nu} - 1) dt/t on
    [0, 1/N0].

    The polynomial is 1 + S_2 nu^2 + ... + S_5 nu^5 (the nu coefficient
    vanishes); the remainder encloses the sixth nu-derivative integral
    over the whole domain, divided by 6!, computed by the same
    three-piece split as the S_n values themselves, at split points
    1e-8 and 1 - 1e-8.

    quad_tol steers the coefficient quadratures.  rem_tol is the panel
    width target for the remainder quadratures; the raw sixth-derivative
    integral runs into the hundreds and is divided by 6! and multiplied
    by nu^6 on use, so the default keeps its enclosure cheap without
    costing anything downstream.
    """
    from polyspec.special import _check_disk, log_power_integrals, s_n
    from polyspec.quadrature import DepthExceeded, integrate

    if degree != 5:
        raise ValueError(f"only the degree-5 model is implemented, got {degree}")
    if not isinstance(N0, int) or N0 < 3:
        raise ValueError(f"N0 must be an integer >= 3, got {N0}")
    z = z if isinstance(z, ComplexBox) else cbox(z)
    _check_disk(z, "tm_FN")
    nu0 = iv(1) / N0
    domain = iv(0).hull(nu0)
    nu = iv(0).hull(nu0)

    one = ComplexBox(iv(1), iv(0))
    coeffs = [one, ComplexBox(iv(0), iv(0))]
    for n in (2, 3, 4, 5):
        coeffs.append(s_n(n, z, quad_tol=quad_tol))

    eps = iv("1e-8")
    a = eps
    overlaps_one = z.contains(one)
    near_zero = _fn_sixth_near_zero(z, nu, a, log_power_integrals)
    if overlaps_one:
        b = 1 - eps
        near_one = _fn_sixth_near_one(z, nu, b, N0, log_power_integrals)
    else:
        near_one = ComplexBox(iv(0), iv(0))
    half = iv(1) / 2
    # the remainder enters scaled by nu^6, so rem_tol is a per-panel
    # width target on the raw sixth-derivative integral, far coarser
    # than the coefficient quadratures need
    try:
        middle = integrate(
            _fn_sixth_family(z, nu, "log"), log(a), log(half), tol=rem_tol
        )
        if overlaps_one:
            right = integrate(
                _fn_sixth_family(z, nu, "log1m"), log(eps), log(half), tol=rem_tol
            )
        else:
            right = integrate(
                _fn_sixth_family(z, nu, "linear"), half, iv(1), tol=rem_tol
            )
    except DepthExceeded as e:
        raise QuadratureFailure(
            f"middle piece of the F_N remainder did not converge: {e}"
        ) from e
    delta = (near_zero + middle + right + near_one) / 720
    return TaylorModel(0, domain, coeffs, delta)
