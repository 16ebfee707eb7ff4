"""Global extremum enclosure and root isolation over real intervals.

Branch-and-bound with a best-first queue: subintervals are ranked by their
enclosure's upper bound (for a maximum), pruned against the running lower
bound, and refined either by bisection alone or, when the objective also
acts on jets, by a degree-p Taylor polynomial whose extremum is located
through derivative root isolation, plus a Lagrange remainder over the box.
Everything returned is a mathematical enclosure; hitting the depth cap
degrades width, never soundness.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Optional

from mpmath.libmp import mpf_gt, mpf_lt

from polyspec.interval import EmptyIntersection, RealInterval, iv
from polyspec.taylor import Jet

__all__ = [
    "ExtremumRequest",
    "ObjectiveEvaluationError",
    "InconclusiveIsolation",
    "enclose_extremum",
    "enclose_max",
    "enclose_min",
    "isolate_roots",
    "refine_root",
]


class ObjectiveEvaluationError(RuntimeError):
    """The objective failed to produce an enclosure on a subinterval."""


# audit seam: when set, called as hook(box, enclosure, best_lower_bound)
# every time a subinterval is discarded by pruning; not a stable surface
_prune_hook = None


class InconclusiveIsolation(RuntimeError):
    """Root isolation hit its resolution floor with undecided intervals."""

    def __init__(self, message, certified, undecided):
        super().__init__(message)
        self.certified = certified
        self.undecided = undecided


@dataclass(frozen=True)
class ExtremumRequest:
    """What to optimize and how hard to try.

    objective maps a RealInterval to an enclosure of the function's image
    on it.  jet_objective, when given, maps a Jet to a Jet and switches on
    Taylor refinement at taylor_degree; objectives that are not smooth
    (moduli, hulls of branches) simply leave it None and get pure
    bisection.
    """

    objective: Callable[[RealInterval], RealInterval]
    interval: RealInterval
    mode: str = "max"
    tolerance: float = 1e-10
    max_depth: int = 40
    taylor_degree: int = 8
    jet_objective: Optional[Callable[[Jet], Jet]] = None
    max_boxes: int = 200_000

    def __post_init__(self):
        if self.mode not in ("min", "max"):
            raise ValueError(f"mode must be 'min' or 'max', got {self.mode!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_depth < 1 or self.max_depth > 200:
            raise ValueError("max_depth must be in [1, 200]")
        if self.taylor_degree < 1:
            raise ValueError("taylor_degree must be >= 1")


def _wrap(fn, what):
    def call(x):
        try:
            return fn(x)
        except (ArithmeticError, ValueError) as e:
            raise ObjectiveEvaluationError(f"{what} failed on {x}: {e}") from e

    return call


class _Refiner:
    """Per-box evaluation: plain enclosure, optionally tightened by a
    monotonicity test and a Taylor polynomial bound."""

    def __init__(self, f, jet_f, degree):
        self.f = f
        self.jet_f = jet_f
        self.degree = degree

    def plain(self, box):
        return self.f(box)

    def refined(self, box):
        enc = self.f(box)
        if self.jet_f is None or box.is_point():
            return enc
        p = self.degree
        try:
            lagr = self.jet_f(Jet.variable(box, p + 1))
        except (ArithmeticError, ValueError):
            return enc
        # monotone shortcut from the first derivative enclosure
        d1 = lagr.coeffs[1]
        if d1.is_positive() or d1.is_negative():
            lo_v = self.f(RealInterval._raw((box.a, box.a)))
            hi_v = self.f(RealInterval._raw((box.b, box.b)))
            tight = lo_v.hull(hi_v)
            return _safe_intersect(enc, tight)
        try:
            point = self.jet_f(Jet.variable(box.mid(), p))
        except (ArithmeticError, ValueError):
            return enc
        dt = box - box.mid()
        candidates = _critical_candidates(point.coeffs, dt)
        vals = [_poly_eval_iv(point.coeffs, c) for c in candidates]
        rem = lagr.coeffs[p + 1] * dt.pow_int(p + 1)
        lo = _raw_min(v.a for v in vals)
        hi = _raw_max(v.b for v in vals)
        tight = RealInterval._raw((lo, hi)) + rem
        return _safe_intersect(enc, tight)


def _raw_min(items):
    out = None
    for x in items:
        if out is None or mpf_lt(x, out):
            out = x
    return out


def _raw_max(items):
    out = None
    for x in items:
        if out is None or mpf_gt(x, out):
            out = x
    return out


def _safe_intersect(a, b):
    try:
        return a.intersect(b)
    except EmptyIntersection:
        # both are sound enclosures; empties arise only from rounding noise
        return a if a.width_float() <= b.width_float() else b


def _poly_eval_iv(coeffs, x):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _poly_derivative(coeffs):
    return [coeffs[k] * k for k in range(1, len(coeffs))]


def _critical_candidates(coeffs, dt):
    """Subintervals of dt that may hold the polynomial's extremum."""
    cands = [
        RealInterval._raw((dt.a, dt.a)),
        RealInterval._raw((dt.b, dt.b)),
    ]
    dcoeffs = _poly_derivative(list(coeffs))
    if len(dcoeffs) <= 1:
        return cands
    ddcoeffs = _poly_derivative(dcoeffs)

    def dp(x):
        return _poly_eval_iv(dcoeffs, x)

    def ddp(x):
        return _poly_eval_iv(ddcoeffs, x) if ddcoeffs else iv(0)

    certified, undecided = _isolation_engine(
        dp, ddp, dt, tol=max(1e-6 * dt.width_float(), 1e-300), max_depth=24, max_boxes=512
    )
    cands.extend(certified)
    cands.extend(undecided)
    return cands


def enclose_extremum(req: ExtremumRequest, full_output: bool = False):
    """Enclosure of the global extremum of req.objective on req.interval.

    Always sound; the info dict (full_output) reports whether the width
    target was met before the depth or box budget ran out.
    """
    f = _wrap(req.objective, "objective")
    # the jet route is opportunistic: failures on wide boxes (domain
    # violations under the jet's interval arithmetic) fall back to the
    # plain enclosure inside _Refiner rather than aborting
    jet_f = req.jet_objective
    if req.mode == "min":
        neg = ExtremumRequest(
            objective=lambda x: -req.objective(x),
            interval=req.interval,
            mode="max",
            tolerance=req.tolerance,
            max_depth=req.max_depth,
            taylor_degree=req.taylor_degree,
            jet_objective=(lambda j: -req.jet_objective(j)) if req.jet_objective else None,
            max_boxes=req.max_boxes,
        )
        res, info = enclose_extremum(neg, full_output=True)
        res = -res
        return (res, info) if full_output else res

    refiner = _Refiner(f, jet_f, req.taylor_degree)
    box = req.interval
    enc = refiner.refined(box)
    best_lo = enc.a
    mid_v = f(box.mid())
    if mpf_gt(mid_v.a, best_lo):
        best_lo = mid_v.a

    seq = 0
    heap = [(-enc.hi_float(), seq, box, enc, 0)]
    terminal_hi = None
    popped = 0

    while heap:
        _, _, box, enc, depth = heapq.heappop(heap)
        popped += 1
        cur_hi = enc.b
        if terminal_hi is not None and mpf_gt(terminal_hi, cur_hi):
            cur_hi = terminal_hi
        span = RealInterval._raw((best_lo, cur_hi))
        if span.width_float() <= req.tolerance:
            terminal_hi = cur_hi
            break
        if mpf_lt(enc.b, best_lo):
            if _prune_hook is not None:
                _prune_hook(box, enc, RealInterval._raw((best_lo, best_lo)))
            continue
        if depth >= req.max_depth or popped >= req.max_boxes:
            if terminal_hi is None or mpf_gt(enc.b, terminal_hi):
                terminal_hi = enc.b
            continue
        try:
            left, right = box.bisect()
        except ValueError:
            if terminal_hi is None or mpf_gt(enc.b, terminal_hi):
                terminal_hi = enc.b
            continue
        for child in (left, right):
            cenc = _safe_intersect(refiner.refined(child), enc)
            if mpf_gt(cenc.a, best_lo):
                best_lo = cenc.a
            mid_v = f(child.mid())
            if mpf_gt(mid_v.a, best_lo):
                best_lo = mid_v.a
            if mpf_lt(cenc.b, best_lo):
                if _prune_hook is not None:
                    _prune_hook(child, cenc, RealInterval._raw((best_lo, best_lo)))
                continue
            seq += 1
            heapq.heappush(heap, (-cenc.hi_float(), seq, child, cenc, depth + 1))

    if terminal_hi is None:
        # everything pruned against best_lo; the max is best_lo itself
        terminal_hi = best_lo
    hi = terminal_hi
    for item in heap:
        if mpf_gt(item[3].b, hi):
            hi = item[3].b
    result = RealInterval._raw((best_lo, hi))
    met = result.width_float() <= req.tolerance
    if full_output:
        return result, {"tolerance_met": met, "boxes": popped}
    return result


def enclose_max(f, interval, tolerance=1e-10, jet_objective=None, **kw) -> RealInterval:
    return enclose_extremum(
        ExtremumRequest(
            objective=f,
            interval=interval,
            mode="max",
            tolerance=tolerance,
            jet_objective=jet_objective,
            **kw,
        )
    )


def enclose_min(f, interval, tolerance=1e-10, jet_objective=None, **kw) -> RealInterval:
    return enclose_extremum(
        ExtremumRequest(
            objective=f,
            interval=interval,
            mode="min",
            tolerance=tolerance,
            jet_objective=jet_objective,
            **kw,
        )
    )


# -- root isolation -----------------------------------------------------------


def _isolation_engine(f, df, interval, tol, max_depth, max_boxes=20_000):
    """Adaptive bisection returning (certified, undecided) interval lists.

    certified: contains exactly one root (endpoint sign change plus
    derivative sign constancy).  undecided: could not be excluded or
    certified at the resolution floor.  Exclusion is 0 not in f(box).
    """
    certified = []
    undecided = []
    stack = [(interval, 0)]
    seen = 0
    while stack:
        box, depth = stack.pop()
        seen += 1
        v = f(box)
        if not v.contains_zero():
            continue
        if df is not None:
            dv = df(box)
            if dv.is_positive() or dv.is_negative():
                fa = f(RealInterval._raw((box.a, box.a)))
                fb = f(RealInterval._raw((box.b, box.b)))
                neg_a, pos_a = fa.is_negative(), fa.is_positive()
                neg_b, pos_b = fb.is_negative(), fb.is_positive()
                if (neg_a and pos_b) or (pos_a and neg_b):
                    certified.append(box)
                    continue
                if (neg_a and neg_b) or (pos_a and pos_b):
                    # monotone without a sign change: no root
                    continue
        if box.width_float() <= tol or depth >= max_depth or seen >= max_boxes:
            undecided.append(box)
            continue
        try:
            left, right = box.bisect()
        except ValueError:
            undecided.append(box)
            continue
        stack.append((right, depth + 1))
        stack.append((left, depth + 1))
    certified.sort(key=lambda b: b.lo_float())
    undecided.sort(key=lambda b: b.lo_float())
    return certified, undecided


def isolate_roots(f, interval, df=None, tol=1e-12, max_depth=60):
    """Disjoint intervals each certified to contain exactly one root of f.

    Certification needs the derivative enclosure df; without it nothing can
    be certified and any sign change ends up in the InconclusiveIsolation
    report.  Raises InconclusiveIsolation when undecided intervals remain
    at the resolution floor; its .certified/.undecided fields let callers
    widen conservatively instead of failing.
    """
    f = _wrap(f, "function")
    dfw = _wrap(df, "derivative") if df is not None else None
    certified, undecided = _isolation_engine(f, dfw, interval, tol, max_depth)
    if undecided:
        raise InconclusiveIsolation(
            f"{len(undecided)} undecided interval(s) at resolution floor "
            f"(first: {undecided[0]})",
            certified,
            undecided,
        )
    return certified


def refine_root(f, df, box, tol=1e-30, max_iter=200):
    """Shrink a bracket around a simple root by interval Newton steps.

    box must contain a root with df sign-constant on it (as produced by
    isolate_roots); each step is sound, so the result always contains the
    root regardless of convergence.
    """
    f = _wrap(f, "function")
    df = _wrap(df, "derivative")
    for _ in range(max_iter):
        if box.rad_float() <= tol:
            break
        m = box.mid()
        d = df(box)
        if d.contains_zero():
            break
        step = m - f(m) / d
        try:
            newbox = step.intersect(box)
        except EmptyIntersection:
            # Newton says the root is outside: only rounding noise on a
            # certified bracket; keep the bracket
            break
        if newbox == box:
            try:
                lo, hi = box.bisect()
            except ValueError:
                break
            keep = lo if f(lo).contains_zero() else hi
            newbox = keep
        box = newbox
    return box
