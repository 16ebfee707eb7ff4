"""Enclosures of integrals of analytic functions along straight segments.

The path runs between the midpoints of the (possibly wide) endpoint boxes;
endpoint width is absorbed exactly by the correction terms
(a - mid(a)) f(a) + (b - mid(b)) f(b).  Each panel is bounded either by a
degree-k Taylor expansion in the path parameter (polynomial integrated
exactly, Lagrange term over the panel) or, when no jet route exists or it
fails, by plain interval evaluation times panel length.  Branch-cut guards
run on every evaluated parameter box; a panel that cannot be certified
analytic is split, and raises only once splitting is exhausted.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from polyspec.interval import (
    BranchCutOverlap,
    ComplexBox,
    RealInterval,
    cbox,
    iv,
)
from polyspec.taylor import Jet

__all__ = [
    "IntegrandFamily",
    "DepthExceeded",
    "integrate",
    "guard_off_negative_axis",
    "guard_linear_off_negative_axis",
    "guard_off_ray_from_one",
]


class DepthExceeded(ArithmeticError):
    """Subdivision cap hit before every panel met the width target.

    Raised only by the plain-return form of integrate; the full_output
    form returns the (sound, wide) hull with tolerance_met False instead.
    The .enclosure attribute carries that hull.
    """

    def __init__(self, message, enclosure):
        super().__init__(message)
        self.enclosure = enclosure


def guard_off_negative_axis(t: ComplexBox) -> bool:
    """Safe when the box cannot meet the cut (-inf, 0]."""
    return not t.touches_negative_axis()


def guard_linear_off_negative_axis(z) -> Callable[[ComplexBox], bool]:
    """Guard for integrands with a cut where 1 - t*z is in (-inf, 0]."""
    zb = z if isinstance(z, ComplexBox) else cbox(z)

    def guard(t: ComplexBox) -> bool:
        return not (1 - t * zb).touches_negative_axis()

    return guard


def guard_off_ray_from_one(t: ComplexBox) -> bool:
    """Safe when the box cannot meet the cut [1, inf)."""
    return not t.im.contains_zero() or t.re.strictly_less(iv(1))


@dataclass(frozen=True)
class IntegrandFamily:
    """An integrand as interval data: a box evaluator, the guards that
    certify analyticity on each evaluated box, and optionally the same
    formula on jets (enables Taylor-model panels; omit it for integrands
    that are awkward to differentiate and bisection alone will be used).
    """

    evaluator: Callable[[ComplexBox], ComplexBox]
    cut_guards: Tuple[Callable[[ComplexBox], bool], ...] = ()
    jet_evaluator: Optional[Callable[[Jet], Jet]] = None


def _as_box(v) -> ComplexBox:
    if isinstance(v, ComplexBox):
        return v
    if isinstance(v, RealInterval):
        return ComplexBox(v, iv(0))
    return cbox(v)


def _is_zero_point(b: ComplexBox) -> bool:
    return b.re.is_point() and b.im.is_point() and b.contains_zero()


def _guards_pass(family, t_box):
    for g in family.cut_guards:
        if not g(t_box):
            return False
    return True


def _checked_eval(family, t_box):
    if not _guards_pass(family, t_box):
        raise BranchCutOverlap(f"cut guard fired on {t_box}")
    return family.evaluator(t_box)


def _t_jet(t0: ComplexBox, delta: ComplexBox, degree: int) -> Jet:
    zero = ComplexBox(iv(0), iv(0))
    return Jet((t0, delta) + (zero,) * (degree - 1))


def _panel_value(family, z_of, delta, u, v, degree):
    """Enclosure of int_u^v f(z(s)) ds over one panel; raises on guard or
    evaluation failure so the caller can split."""
    s_box = iv(u, v)
    t_box = z_of(s_box)
    if not _guards_pass(family, t_box):
        raise BranchCutOverlap(f"cut guard fired on panel [{u}, {v}]")
    if family.jet_evaluator is not None:
        try:
            m = (u + v) / 2
            h = v - m
            jet_pt = family.jet_evaluator(_t_jet(z_of(iv(m)), delta, degree))
            jet_wide = family.jet_evaluator(_t_jet(t_box, delta, degree + 1))
            top = jet_wide.coeffs[degree + 1]
            acc = ComplexBox(iv(0), iv(0))
            hiv = iv(h)
            for j in range(0, degree + 1, 2):
                moment = hiv.pow_int(j + 1) * 2 / (j + 1)
                acc = acc + jet_pt.coeffs[j] * moment
            w = hiv.pow_int(degree + 2) * 2 / (degree + 2)
            return acc + top * (iv(-1, 1) * w)
        except (ArithmeticError, ValueError):
            pass
    val = family.evaluator(t_box)
    return val * iv(v - u)


def integrate(
    family: IntegrandFamily,
    a,
    b,
    tol: float = 1e-10,
    max_depth: int = 30,
    degree: int = 4,
    full_output: bool = False,
    max_panels: int = 100_000,
):
    """Enclosure of the integral of the family along [mid(a), mid(b)],
    plus the wide-endpoint corrections.

    Adaptive: the widest panel splits first, until every panel's enclosure
    has width <= tol or the depth cap.  With full_output the hull comes
    back with a tolerance_met flag; without it a missed target raises
    DepthExceeded (carrying the hull) so a wide result is never mistaken
    for a verified one.
    """
    a = _as_box(a)
    b = _as_box(b)
    mid_a, mid_b = a.mid(), b.mid()
    delta = mid_b - mid_a

    corrections = ComplexBox(iv(0), iv(0))
    for endpoint, midpoint in ((a, mid_a), (b, mid_b)):
        wide = endpoint - midpoint
        if _is_zero_point(wide):
            continue
        corrections = corrections + wide * _checked_eval(family, endpoint)

    def z_of(s):
        return mid_a + delta * s

    met = True
    done = []  # (u, v, value)
    panels = 0
    if not _is_zero_point(delta):
        heap = []
        seq = 0

        def push(u, v, depth):
            nonlocal seq
            try:
                val = _panel_value(family, z_of, delta, u, v, degree)
                key = -val.width_float()
                if math.isnan(key):
                    key = -math.inf
                item = (key, seq, u, v, depth, val, None)
            except (ArithmeticError, ValueError) as trouble:
                item = (-math.inf, seq, u, v, depth, None, trouble)
            seq += 1
            heapq.heappush(heap, item)

        push(0.0, 1.0, 0)
        while heap:
            key, _, u, v, depth, val, trouble = heapq.heappop(heap)
            panels += 1
            if trouble is None and -key <= tol:
                done.append((u, v, val))
                # heap order: every remaining panel is at least as narrow
                while heap:
                    k2, _, u2, v2, _, v2val, t2 = heapq.heappop(heap)
                    done.append((u2, v2, v2val))
                break
            m = (u + v) / 2
            splittable = u < m < v
            if depth >= max_depth or panels >= max_panels or not splittable:
                if trouble is not None:
                    raise BranchCutOverlap(
                        f"panel [{u}, {v}] cannot be certified analytic "
                        f"after splitting: {trouble}"
                    ) from trouble
                done.append((u, v, val))
                met = False
                continue
            push(u, m, depth + 1)
            push(m, v, depth + 1)

    total = ComplexBox(iv(0), iv(0))
    for _, _, val in sorted(done, key=lambda t: t[0]):
        total = total + val
    result = delta * total + corrections

    if full_output:
        return result, {"tolerance_met": met, "panels": panels}
    if not met:
        raise DepthExceeded(
            f"width target {tol} not reached within depth {max_depth}", result
        )
    return result
