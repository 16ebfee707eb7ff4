"""Segment quadrature against closed forms.

Oracles are computed in interval arithmetic from independent identities:
the dilogarithm value at 1/2 and the elementary antiderivative of
log^2(1-s).  The singular right end of the log^2 integral is handled the
way the guard contract prescribes: quadrature on the regular part, an
analytic closed form on the sliver next to the singularity.
"""

import math
import random

import pytest

from polyspec.interval import (
    BranchCutOverlap,
    ComplexBox,
    cbox,
    exp as iv_exp,
    iv,
    log as iv_log,
    pi_interval,
)
from polyspec.quadrature import (
    DepthExceeded,
    IntegrandFamily,
    guard_linear_off_negative_axis,
    guard_off_negative_axis,
    guard_off_ray_from_one,
    integrate,
)
from polyspec.taylor import Jet, jet_exp, jet_log


def _identity_family():
    return IntegrandFamily(evaluator=lambda t: t, jet_evaluator=lambda t: t)


class TestBasics:
    def test_linear_integrand(self):
        res = integrate(_identity_family(), 0, 1, tol=1e-12)
        assert res.re.contains(iv(1) / 2)
        assert res.im.contains_zero()
        assert res.width_float() <= 1e-10

    def test_exponential_against_closed_form(self):
        fam = IntegrandFamily(evaluator=lambda t: t.exp(), jet_evaluator=jet_exp)
        res = integrate(fam, 0, 1, tol=1e-12)
        exact = iv_exp(iv(1)) - 1
        assert res.re.contains(exact)
        assert res.width_float() <= 1e-9

    def test_complex_segment(self):
        # int_0^i exp(t) dt = exp(i) - 1 = (cos 1 - 1) + i sin 1
        fam = IntegrandFamily(evaluator=lambda t: t.exp(), jet_evaluator=jet_exp)
        res = integrate(fam, 0, 1j, tol=1e-12)
        target = cbox(1j).exp() - 1
        assert res.contains(target.mid())
        assert res.width_float() <= 1e-9

    def test_two_runs_identical(self):
        fam = IntegrandFamily(evaluator=lambda t: t.exp(), jet_evaluator=jet_exp)
        r1 = integrate(fam, 0, 1, tol=1e-10)
        r2 = integrate(fam, 0, 1, tol=1e-10)
        assert r1.re == r2.re and r1.im == r2.im


def _dilog_spec_family(z):
    """-4 log(1 - t z)/t with the removable singularity at t = 0 filled
    by the power series 4 z sum_k (t z)^(k-1) / k."""
    zb = cbox(z)

    def series(t):
        w = t * zb
        r = w.abs().mag()
        if not r.strictly_less(iv("0.9")):
            raise BranchCutOverlap(f"series evaluator needs |tz| < 0.9, got {r}")
        acc = ComplexBox(iv(0), iv(0))
        powk = ComplexBox(iv(1), iv(0))  # w^(k-1)
        n_terms = 40
        for k in range(1, n_terms + 1):
            acc = acc + powk / k
            powk = powk * w
        # geometric tail: sum_{k>n} |w|^(k-1)/k <= r^n / (1 - r)
        tail = r.pow_int(n_terms) / (1 - r)
        t_box = iv(-1, 1) * tail
        acc = acc + ComplexBox(t_box, t_box)
        return acc * zb * 4

    def evaluator(t):
        if t.contains_zero():
            return series(t)
        return (1 - t * zb).log() * (-4) / t

    def jet_evaluator(tj):
        return jet_log(1 - tj * zb) * (-4) / tj

    return IntegrandFamily(
        evaluator=evaluator,
        cut_guards=(guard_linear_off_negative_axis(zb),),
        jet_evaluator=jet_evaluator,
    )


class TestSpecIntegrals:
    def test_dilog_value_at_half(self):
        # int_0^1 -4 log(1 - t/2)/t dt / 2! = 2 Li2(1/2) = pi^2/6 - log^2 2
        fam = _dilog_spec_family(0.5)
        res = integrate(fam, 0, 1, tol=1e-11)
        res = res / 2
        oracle = pi_interval().square() / 6 - iv_log(iv(2)).square()
        assert res.re.contains(oracle)
        assert res.im.contains_zero()
        assert res.width_float() <= 1e-7

    def test_log_square_next_to_singularity(self):
        # int_{0.9}^{1} log^2(1-s) ds; the integrand is unbounded at s = 1,
        # so quadrature runs on [0.9, 1-delta] and the remaining sliver is
        # the elementary integral int_0^delta log^2 u du, per the guard
        # contract ("treat the piece analytically")
        delta = 2.0**-24

        def evaluator(t):
            return cbox(iv_log(1 - t.re).square(), iv(0))

        def jet_evaluator(tj):
            lg = jet_log(1 - tj)
            return lg * lg

        fam = IntegrandFamily(
            evaluator=evaluator,
            cut_guards=(guard_off_ray_from_one,),
            jet_evaluator=jet_evaluator,
        )
        body = integrate(fam, iv("0.9"), iv(1 - delta), tol=1e-13)
        # int_0^d log^2 u du = d (log^2 d - 2 log d + 2)
        d = iv(delta)
        ld = iv_log(d)
        tail_exact = d * (ld.square() - 2 * ld + 2)
        # the sliver integrand is monotone; crude enclosure also works:
        # 0 <= tail <= d * log^2(d) is implied by tail_exact's positivity
        assert tail_exact.is_positive()
        total = body.re + tail_exact
        # oracle: same antiderivative over the whole range, u = 1-s
        u = iv("0.1")
        lu = iv_log(u)
        oracle = u * (lu.square() - 2 * lu + 2)
        assert total.overlaps(oracle)
        diff = total - oracle
        assert diff.mag().hi_float() <= 1e-10


class TestEndpointCorrections:
    def test_wide_left_endpoint(self):
        fam = _identity_family()
        a = cbox(iv("-0.1", "0.1"), iv(0))
        res = integrate(fam, a, 1, tol=1e-12)
        for alpha in (-0.1, 0.0, 0.1):
            value = (1 - alpha * alpha) / 2
            assert res.re.lo_float() <= value <= res.re.hi_float()

    def test_point_singular_endpoint_never_evaluated(self):
        # evaluator raises off the open unit interval; point endpoints must
        # not trigger endpoint evaluations
        def evaluator(t):
            if not t.re.strictly_less(iv(1)):
                raise AssertionError("endpoint box evaluated")
            return t

        fam = IntegrandFamily(evaluator=evaluator)
        res = integrate(fam, 0, iv("0.99"), tol=1e-6)
        assert res.re.contains(iv("0.99").square() / 2)


class TestGuards:
    def test_guard_predicates_on_crafted_boxes(self):
        assert not guard_off_negative_axis(cbox(iv(-2, -1), iv(0)))
        assert guard_off_negative_axis(cbox(iv(-2, -1), iv("0.5", 1)))
        assert guard_off_negative_axis(cbox(iv(1, 2), iv(0)))
        g = guard_linear_off_negative_axis(2)
        assert not g(cbox(iv("0.5", "0.8"), iv(0)))  # 1-2t in [-0.6, 0]
        assert g(cbox(iv(0, "0.4"), iv(0)))
        assert not guard_off_ray_from_one(cbox(iv("0.9", "1.1"), iv(0)))
        assert guard_off_ray_from_one(cbox(iv("0.9", "0.99"), iv(0)))
        assert guard_off_ray_from_one(cbox(iv("0.9", "1.1"), iv("0.1", "0.2")))

    def test_segment_crossing_cut_raises(self):
        fam = IntegrandFamily(
            evaluator=lambda t: t.log(),
            cut_guards=(guard_off_negative_axis,),
            jet_evaluator=jet_log,
        )
        with pytest.raises(BranchCutOverlap):
            integrate(fam, cbox(-0.5 - 0.1j), cbox(-0.5 + 0.1j), tol=1e-8, max_depth=8)

    def test_ray_guard_fires_inside_segment(self):
        fam = IntegrandFamily(
            evaluator=lambda t: t,
            cut_guards=(guard_off_ray_from_one,),
        )
        with pytest.raises(BranchCutOverlap):
            integrate(fam, iv("0.5"), iv("1.5"), tol=1e-8, max_depth=8)


class TestAdaptivity:
    def test_depth_cap_raises_or_flags(self):
        # without jets the fallback converges too slowly for this target
        fam = IntegrandFamily(evaluator=lambda t: t.exp())
        with pytest.raises(DepthExceeded) as exc:
            integrate(fam, 0, 1, tol=1e-12, max_depth=4)
        hull = exc.value.enclosure
        exact = iv_exp(iv(1)) - 1
        assert hull.re.contains(exact)
        res, info = integrate(fam, 0, 1, tol=1e-12, max_depth=4, full_output=True)
        assert not info["tolerance_met"]
        assert res.re.contains(exact)

    def test_additivity(self):
        rng = random.Random(20260816)
        for _ in range(5):
            c_re, c_im = rng.uniform(-1, 1), rng.uniform(-1, 1)
            coeff = cbox(complex(c_re, c_im))

            def ev(t, coeff=coeff):
                return (t * coeff).exp()

            def jev(tj, coeff=coeff):
                return jet_exp(tj * coeff)

            fam = IntegrandFamily(evaluator=ev, jet_evaluator=jev)
            tol = 1e-9
            whole = integrate(fam, 0, 1, tol=tol)
            mid = 0.3
            parts = integrate(fam, 0, mid, tol=tol) + integrate(fam, mid, 1, tol=tol)
            pad = iv(-2 * tol, 2 * tol)
            widened = ComplexBox(whole.re + pad, whole.im + pad)
            assert widened.contains(parts.mid())
            assert widened.overlaps(parts)

    def test_linearity_containment(self):
        f1 = IntegrandFamily(evaluator=lambda t: t.exp(), jet_evaluator=jet_exp)
        f2 = _identity_family()

        def ev(t):
            return t.exp() * 2 + t * 3

        def jev(tj):
            return jet_exp(tj) * 2 + tj * 3

        combo = IntegrandFamily(evaluator=ev, jet_evaluator=jev)
        lhs = integrate(combo, 0, 1, tol=1e-10)
        rhs = integrate(f1, 0, 1, tol=1e-10) * 2 + integrate(f2, 0, 1, tol=1e-10) * 3
        assert lhs.overlaps(rhs)
