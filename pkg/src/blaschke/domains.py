"""Fundamental-domain boundary curves.

Closed-form parametrizations exist for the four structured families; an
arbitrary finite product gets its boundaries by simultaneous continuation:
every sheet of the fiber is lifted along a target-plane path with a
predictor-corrector (previous point + Newton on B(z) - w).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BranchJumpError,
    LiftStallError,
    NearCriticalWarning,
    ParameterError,
)
from .products import BlaschkeProduct, build, SinglePower, TwoZeros, roots_of_unity
from .sphere import INF, ExtComplex, as_ext, chordal, is_inf
from .fibers import fiber_generic

__all__ = [
    "ParamCurve",
    "boundaries_single_power",
    "boundaries_two_zeros",
    "boundaries_rotational",
    "boundaries_two_rings_aligned",
    "boundaries_by_continuation",
    "two_rings_K",
    "ray_segment_path",
    "real_axis_detour_path",
    "general_two_rings_path",
    "curve_set_hausdorff",
    "default_t_grid",
]

T_MAX = 1e4


@dataclass
class ParamCurve:
    """One boundary or pre-image curve: ordered (t, z) samples on the sphere.

    ``targets`` carries the intended w-plane image per sample when the curve
    was produced by lifting a path; closed-form curves instead record their
    image set in ``image_spec`` ("nonneg_axis", ("ray", beta), ...).
    """

    family: str
    branch: int
    samples: list[tuple[float, ExtComplex]]
    start_label: str = ""
    end_label: str = ""
    rho: float | None = None
    targets: list[ExtComplex] | None = None
    image_spec: tuple | None = None

    @property
    def points(self) -> list[ExtComplex]:
        return [z for _, z in self.samples]

    def finite_points(self) -> list[complex]:
        return [complex(z) for _, z in self.samples if not is_inf(z)]

    def max_chordal_step(self) -> float:
        pts = self.points
        return max(chordal(a, b) for a, b in zip(pts, pts[1:]))


def default_t_grid(samples: int, t_max: float = T_MAX, t_min: float = 1e-4) -> np.ndarray:
    """[0] followed by a geometric sweep; unbounded parameter ranges need the
    geometric tail to resolve the slow approach to the far endpoint."""
    if samples < 2:
        raise ParameterError("need at least two samples")
    tail = np.geomspace(t_min, t_max, samples - 1)
    return np.concatenate([[0.0], tail])


# ---------------------------------------------------------------------------
# closed forms


def boundaries_single_power(
    a: complex, n: int, samples: int = 400, t_max: float = T_MAX
) -> list[ParamCurve]:
    """The n circular arcs from a to 1/conj(a); arc k maps onto the
    non-negative real axis (its image is t^n at parameter t)."""
    spec = SinglePower(a, n)
    spec.validate()
    a = complex(a)
    r, th = abs(a), cmath.phase(a)
    e_th = cmath.exp(1j * th)
    ts = default_t_grid(samples, t_max)
    curves = []
    for k, w in enumerate(roots_of_unity(n)):
        pts: list[tuple[float, ExtComplex]] = []
        for t in ts:
            den = w * t * r - 1.0
            if abs(den) < 1e-300:
                pts.append((float(t), INF))
            else:
                pts.append((float(t), as_ext((w * t - r) / den * e_th)))
        curves.append(
            ParamCurve(
                family="single_power",
                branch=k,
                samples=pts,
                start_label="a",
                end_label="1/conj(a)",
                image_spec=("nonneg_axis",),
            )
        )
    return curves


def two_zeros_boundary_point(
    a1: complex, a2: complex, k: int, n: int, t: float, lam: complex, sqrt_delta: complex
) -> tuple[complex, complex]:
    """Both sheet values of the degree-2 solution at parameter t, given the
    tracked square root of the discriminant."""
    r1, r2 = abs(a1), abs(a2)
    th1, th2 = cmath.phase(a1), cmath.phase(a2)
    w = cmath.exp(2j * math.pi * k / n)
    e1, e2 = cmath.exp(1j * th1), cmath.exp(1j * th2)
    num = (r1 - w * r2 * lam * t) * e1 + (r2 - w * r1 * lam * t) * e2
    cross = cmath.exp(1j * (th1 + th2)) * sqrt_delta
    den = 2.0 * (1.0 - w * r1 * r2 * lam * t)
    return (num + cross) / den, (num - cross) / den


def _two_zeros_delta(a1, a2, k, n, t, lam):
    r1, r2 = abs(a1), abs(a2)
    th1, th2 = cmath.phase(a1), cmath.phase(a2)
    w = cmath.exp(2j * math.pi * k / n)
    e1c, e2c = cmath.exp(-1j * th1), cmath.exp(-1j * th2)
    main = (w * r1 * lam * t - r2) * e1c - (w * r2 * lam * t - r1) * e2c
    return main * main + 4.0 * w * (1.0 - r1 * r1) * (1.0 - r2 * r2) * lam * t * cmath.exp(
        -1j * (th1 + th2)
    )


def boundaries_two_zeros(
    a1: complex, a2: complex, n: int, samples: int = 400, t_max: float = T_MAX
) -> list[ParamCurve]:
    """2n curves: sheet-1 curves from a1 to 1/conj(a1) and sheet-2 curves
    from a2 to 1/conj(a2); all map onto the ray through e^{i beta}, where
    beta is the argument of B at the interior free critical point.

    The square root of the discriminant is continued in t (sign fixed at
    t = 0 so the + sheet starts at a1), bisecting the step whenever the
    continuation jump is ambiguous.
    """
    from .critical import critical_two_zeros

    spec = TwoZeros(a1, a2, n)
    spec.validate()
    a1, a2 = complex(a1), complex(a2)
    B = build(spec)
    crit = critical_two_zeros(a1, a2, n)
    b = crit.interior[-1][0]
    beta = cmath.phase(B(b))
    lam = cmath.exp(1j * beta / n)
    r1, r2 = abs(a1), abs(a2)
    th1, th2 = cmath.phase(a1), cmath.phase(a2)
    sq0 = r1 * cmath.exp(-1j * th2) - r2 * cmath.exp(-1j * th1)

    ts = default_t_grid(samples, t_max)
    curves = []
    mirror1 = 1.0 / a1.conjugate()
    mirror2 = 1.0 / a2.conjugate()
    for k in range(n):
        delta = lambda tt: _two_zeros_delta(a1, a2, k, n, tt, lam)
        track = _SqrtTrack(delta, 0.0, sq0)
        path1: list[tuple[float, ExtComplex]] = []
        path2: list[tuple[float, ExtComplex]] = []
        for t in ts:
            sq = track.advance(float(t))
            z1, z2 = two_zeros_boundary_point(a1, a2, k, n, float(t), lam, sq)
            path1.append((float(t), as_ext(z1)))
            path2.append((float(t), as_ext(z2)))
        _fix_sheet_tails(path1, path2, mirror1, mirror2)
        curves.append(
            ParamCurve(
                "two_zeros", k, path1, "a1", "1/conj(a1)", image_spec=("ray", beta)
            )
        )
        curves.append(
            ParamCurve(
                "two_zeros", n + k, path2, "a2", "1/conj(a2)", image_spec=("ray", beta)
            )
        )
    return curves


class _SqrtTrack:
    """Continuous square root of a parametrized discriminant.

    Nearest-value matching against a linear predictor, with step bisection
    when ambiguous; at a genuine zero of the discriminant (where the two
    sheets of the curve meet) the tiny value passes through and either sign
    is accepted.
    """

    def __init__(self, delta_of_t, t0: float, sq0: complex):
        self.delta = delta_of_t
        self.t_prev = t0
        self.sq_prev = sq0
        self.t_prev2 = None
        self.sq_prev2 = None

    def _predict(self, t: float) -> complex:
        if self.t_prev2 is None or self.t_prev == self.t_prev2:
            return self.sq_prev
        slope = (self.sq_prev - self.sq_prev2) / (self.t_prev - self.t_prev2)
        return self.sq_prev + slope * (t - self.t_prev)

    def advance(self, t: float, depth: int = 0) -> complex:
        s = cmath.sqrt(self.delta(t))
        if not (math.isfinite(s.real) and math.isfinite(s.imag)):
            raise BranchJumpError(f"discriminant not finite near t = {t}")
        pred = self._predict(t)
        if abs(s - pred) > abs(s + pred):
            s = -s
        ambiguous = abs(s - pred) > 0.45 * abs(s + pred)
        crossing = abs(s) <= 1e-4 * max(abs(self.sq_prev), 1e-30)
        step_floor = (t - self.t_prev) <= 1e-12 * max(1.0, t)
        if ambiguous and not crossing and not step_floor and depth < 40:
            mid = 0.5 * (self.t_prev + t)
            if mid != self.t_prev and mid != t:
                self.advance(mid, depth + 1)
                return self.advance(t, depth + 1)
        # at a zero of the discriminant the sheets genuinely meet: pass
        # through with the predictor's sign
        self.t_prev2, self.sq_prev2 = self.t_prev, self.sq_prev
        self.t_prev, self.sq_prev = t, s
        return s


def _fix_sheet_tails(path1, path2, mirror1, mirror2):
    """When the two sheets of one k-branch meet at the interior branch point,
    the sign convention beyond the meeting point is arbitrary; swap tails if
    needed so sheet 1 still ends at 1/conj(a1)."""
    e1, e2 = path1[-1][1], path2[-1][1]
    if chordal(e1, mirror1) <= chordal(e1, mirror2):
        return
    # locate the meeting point and swap beyond it
    best_i, best_d = 0, math.inf
    for i, ((_, z1), (_, z2)) in enumerate(zip(path1, path2)):
        if is_inf(z1) or is_inf(z2):
            continue
        d = abs(complex(z1) - complex(z2))
        if d < best_d:
            best_i, best_d = i, d
    for i in range(best_i, len(path1)):
        t1, z1 = path1[i]
        t2, z2 = path2[i]
        path1[i] = (t1, z2)
        path2[i] = (t2, z1)


def boundaries_rotational(
    r: float, alpha: float, n: int, samples: int = 400, t_max: float = T_MAX
) -> list[ParamCurve]:
    """n rays from 0 to INF at angles alpha + (2k+1) pi / n; independent of r.
    Each ray maps into the real interval [r^n, 1/r^n]."""
    if not 0 < r < 1:
        raise ParameterError("radius must satisfy 0 < r < 1")
    ts = default_t_grid(samples, t_max)
    curves = []
    for k in range(n):
        ang = alpha + (2 * k + 1) * math.pi / n
        d = cmath.exp(1j * ang)
        pts = [(float(t), as_ext(d * t)) for t in ts]
        pts.append((math.inf, INF))
        curves.append(
            ParamCurve(
                "rotational",
                k,
                pts,
                "0",
                "inf",
                image_spec=("real_segment", r**n, r ** (-n)),
            )
        )
    return curves


def boundaries_two_rings_aligned(
    r1: float, r2: float, alpha: float, n: int, samples: int = 400, t_max: float = T_MAX
) -> list[ParamCurve]:
    """2n rays from 0 to INF at angles alpha + k pi / n."""
    if not (0 < r1 <= r2 < 1):
        raise ParameterError("radii must satisfy 0 < r1 <= r2 < 1")
    ts = default_t_grid(samples, t_max)
    curves = []
    for k in range(2 * n):
        ang = alpha + k * math.pi / n
        d = cmath.exp(1j * ang)
        pts = [(float(t), as_ext(d * t)) for t in ts]
        pts.append((math.inf, INF))
        curves.append(
            ParamCurve("two_rings", k, pts, "0", "inf", image_spec=("real_axis",))
        )
    return curves


def two_rings_K(r1: float, r2: float, n: int, t: complex) -> tuple[complex, complex]:
    """The two solutions of the fiber quadratic in z^n e^{-i n alpha} over
    target t; K1(1) = 1 and K2(1) = -1, and K2 vanishes at t = (r1 r2)^n."""
    S = r1**n + r2**n
    p = r1**n * r2**n
    delta = S * S * (1.0 - t) ** 2 - 4.0 * (p - t) * (1.0 - p * t)
    sq = cmath.sqrt(delta)
    den = 2.0 * (1.0 - p * t)
    return (S * (1.0 - t) + sq) / den, (S * (1.0 - t) - sq) / den


# ---------------------------------------------------------------------------
# simultaneous continuation


def _resample_path(vertices: list[complex], samples: int | None) -> list[complex]:
    """Piecewise-linear resample by arclength, keeping the original vertices;
    a vertex list at least as fine as `samples` is used verbatim."""
    vs = [complex(v) for v in vertices]
    if len(vs) < 2:
        raise ParameterError("target path needs at least two vertices")
    if samples is None or len(vs) >= samples:
        return vs
    seg = [abs(b - a) for a, b in zip(vs, vs[1:])]
    total = sum(seg)
    if total == 0:
        return vs
    out = [vs[0]]
    for (a, b), L in zip(zip(vs, vs[1:]), seg):
        k = max(1, int(round(samples * L / total)))
        for i in range(1, k + 1):
            out.append(a + (b - a) * i / k)
    return out


def _lift_tol(w: complex, tol: float) -> float:
    # relative to the target modulus: tiny fiber targets sit exponentially
    # close to a zero, where an absolute floor would freeze the tracker
    return tol * max(abs(w), 1e-300)


def _newton_lift(
    B: BlaschkeProduct, z: complex, w: complex, max_iter: int = 20, tol: float = 1e-12
) -> complex | None:
    if abs(z) > 1e3:
        return _newton_lift_inverted(B, z, w, max_iter, tol)
    goal = _lift_tol(w, tol)
    for _ in range(max_iter):
        f = B(z)
        if is_inf(f):
            return None
        err = f - w
        if abs(err) <= goal:
            return z
        try:
            d = B.derivative(z)
        except Exception:
            return None
        if abs(d) < 1e-300:
            return None
        z = z - err / d
        if abs(z) > 1e6:
            return _newton_lift_inverted(B, z, w, max_iter, tol)
    f = B(z)
    if not is_inf(f) and abs(f - w) <= 1e3 * goal:
        return z
    return None


def _newton_lift_inverted(B, z, w, max_iter=20, tol=1e-12):
    """Newton in the chart zeta = 1/z, stable for sheets passing near INF."""
    zeta = 1.0 / z
    goal = _lift_tol(w, tol)
    for _ in range(max_iter):
        arg = INF if zeta == 0 else 1.0 / zeta
        f = B(arg)
        if is_inf(f):
            return None
        err = f - w
        if abs(err) <= goal:
            return 1.0 / zeta if zeta != 0 else None
        if zeta == 0:
            zeta = 1e-14
            continue
        try:
            d = -B.derivative(1.0 / zeta) / (zeta * zeta)
        except Exception:
            return None
        if abs(d) < 1e-300 or not (math.isfinite(d.real) and math.isfinite(d.imag)):
            return None
        zeta = zeta - err / d
    arg = INF if zeta == 0 else 1.0 / zeta
    f = B(arg)
    if not is_inf(f) and abs(f - w) <= 1e3 * goal and zeta != 0:
        return 1.0 / zeta
    return None


def boundaries_by_continuation(
    B: BlaschkeProduct,
    target_path: list[complex],
    samples: int | None = None,
    near_critical_tol: float = 1e-6,
) -> list[ParamCurve]:
    """Lift a w-plane path through all N sheets of B.

    The path is a piecewise-linear vertex list (densify arcs beforehand);
    it must avoid the critical values of B except possibly at its endpoints.
    Sheets are seeded with the full fiber over the first regular sample and
    tracked by previous-point prediction plus Newton correction; a stalled
    step is bisected in the path parameter down to 1e-12, then reported.
    """
    ws = _resample_path(target_path, samples)
    N = B.degree

    start_index = 0
    fiber0 = fiber_generic(B, ws[0])
    if _has_multiplicity(fiber0.roots) and len(ws) > 1:
        start_index = 1
    fiber = fiber_generic(B, ws[start_index])
    sheets: list[list[tuple[float, ExtComplex]]] = [[] for _ in range(N)]
    targets: list[list[ExtComplex]] = [[] for _ in range(N)]
    current: list[ExtComplex] = list(fiber.roots)
    t0 = float(start_index)
    for j in range(N):
        sheets[j].append((t0, current[j]))
        targets[j].append(ws[start_index])

    warned = False
    for i in range(start_index + 1, len(ws)):
        w_prev, w_next = ws[i - 1], ws[i]
        previous = list(current)
        for j in range(N):
            zj = current[j]
            if is_inf(zj):
                zj = _reseed_infinite_sheet(B, w_next, current)
                if zj is None:
                    current[j] = INF
                    continue
            current[j], warned = _track_step(
                B, complex(zj), w_prev, w_next, near_critical_tol, warned
            )
        if _has_duplicates(current):
            # two sheets fell into one Newton basin (near-critical crossing):
            # re-solve the fiber and reassign sheets as a permutation
            current = _assign_fiber(B, w_next, previous)
        for j in range(N):
            sheets[j].append((float(i), current[j]))
            targets[j].append(w_next)

    if start_index == 1:
        # prepend the (possibly merged) fiber over the true start point
        for j in range(N):
            z1 = sheets[j][0][1]
            z0 = min(fiber0.roots, key=lambda c: chordal(c, z1))
            sheets[j].insert(0, (0.0, z0))
            targets[j].insert(0, ws[0])

    return [
        ParamCurve(
            family="continuation",
            branch=j,
            samples=sheets[j],
            targets=targets[j],
        )
        for j in range(N)
    ]


def _has_duplicates(points, tol: float = 1e-9) -> bool:
    pts = [p for p in points if not is_inf(p)]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if chordal(pts[i], pts[j]) < tol:
                return True
    return False


def _assign_fiber(B, w, previous):
    """Match the exact fiber over w to the previous sheet positions
    (optimal assignment, so every root is used exactly once)."""
    from scipy.optimize import linear_sum_assignment

    roots = list(fiber_generic(B, w).roots)
    n = len(previous)
    cost = np.zeros((n, n))
    for i, p in enumerate(previous):
        for j, r in enumerate(roots):
            cost[i, j] = chordal(p, r)
    _, cols = linear_sum_assignment(cost)
    return [roots[cols[i]] for i in range(n)]


def _has_multiplicity(roots, tol: float = 1e-6) -> bool:
    rs = list(roots)
    for i in range(len(rs)):
        for j in range(i + 1, len(rs)):
            if chordal(rs[i], rs[j]) < tol:
                return True
    return False


def _reseed_infinite_sheet(B, w, taken):
    """A sheet parked at INF rejoins at the largest-modulus fiber root."""
    cand = [r for r in fiber_generic(B, w).roots if not is_inf(r)]
    if not cand:
        return None
    return max(cand, key=lambda c: abs(c))


def _track_step(B, z, w_prev, w_next, near_tol, warned, depth: int = 0):
    try:
        d = B.derivative(z)
        if abs(d) < near_tol and not warned:
            warnings.warn(
                f"lift passing near a critical point at z ~ {z:.6g}",
                NearCriticalWarning,
            )
            warned = True
    except Exception:
        pass
    z_new = _newton_lift(B, z, w_next)
    if z_new is not None:
        return as_ext(z_new), warned
    if abs(w_next - w_prev) < 1e-12:
        raise LiftStallError(f"lift stalled near w = {w_next} (z ~ {z})")
    if depth >= 60:
        raise LiftStallError(f"lift stalled near w = {w_next} after bisection (z ~ {z})")
    w_mid = 0.5 * (w_prev + w_next)
    z_mid, warned = _track_step(B, z, w_prev, w_mid, near_tol, warned, depth + 1)
    if is_inf(z_mid):
        raise LiftStallError(f"lift reached INF inside a step near w = {w_mid}")
    return _track_step(B, complex(z_mid), w_mid, w_next, near_tol, warned, depth + 1)


# ---------------------------------------------------------------------------
# target-path builders


def ray_segment_path(beta: float, m_lo: float, m_hi: float, samples: int = 200) -> list[complex]:
    """Geometric sweep of w = e^{i beta} m for m in [m_lo, m_hi]."""
    if not 0 < m_lo < m_hi:
        raise ParameterError("need 0 < m_lo < m_hi")
    ms = np.geomspace(m_lo, m_hi, samples)
    d = cmath.exp(1j * beta)
    return [d * float(m) for m in ms]


def real_axis_detour_path(
    w_max: float, detour_radius: float, samples: int = 300, upper: bool = True
) -> list[complex]:
    """The real axis from +w_max to -w_max with a half-circle detour of the
    given radius around the origin."""
    if not 0 < detour_radius < 1 < w_max:
        raise ParameterError("need 0 < detour_radius < 1 < w_max")
    down = [complex(m) for m in np.geomspace(w_max, detour_radius, samples // 3)]
    sgn = 1.0 if upper else -1.0
    arc = [
        detour_radius * cmath.exp(1j * sgn * th)
        for th in np.linspace(0.0, math.pi, max(24, samples // 6))[1:]
    ]
    out = [complex(-m) for m in np.geomspace(detour_radius, w_max, samples // 3)[1:]]
    return down + arc + out


def default_detour_radius(B: BlaschkeProduct) -> float:
    """1e-2 times the distance from 0 to the nearest other critical value."""
    from .critical import critical_general

    crit = critical_general(B)
    vals = [abs(v) for v in crit.images if not is_inf(v) and abs(v) > 1e-12]
    if not vals:
        return 1e-2
    return 1e-2 * min(vals)


def general_two_rings_path(
    B: BlaschkeProduct, samples: int = 200, junction_offset: float = 1e-6
) -> list[complex]:
    """Continuation path for the two-ring family with independent angles:
    along the ray through e^{i beta} from modulus 1 to the branch-point image
    B(b_k), then the straight segment from B(b_k) to B(0).

    The junction sits exactly at a critical value, so the path skirts it by
    a small relative offset; the lifted curves leave a matching pinhole gap
    at the branch point."""
    from .critical import critical_general

    crit = critical_general(B)
    free = [
        (p, v)
        for (p, m), v in zip(crit.interior, crit.images)
        if m == 1 and abs(p) > 1e-9
    ]
    if not free:
        raise ParameterError("no interior free branch point found")
    _, vb = free[0]
    vb = complex(vb)
    beta = cmath.phase(vb)
    half = max(2, samples // 2)
    ms = np.geomspace(1.0, abs(vb) * (1.0 + junction_offset), half)
    ray = [cmath.exp(1j * beta) * float(m) for m in ms]
    b0 = complex(B(0j))
    seg = [
        vb + (b0 - vb) * s
        for s in np.linspace(junction_offset, 1.0, half)
    ]
    return ray + seg


# ---------------------------------------------------------------------------
# comparison helpers


def curve_set_hausdorff(curves_a, curves_b) -> float:
    """Symmetric Hausdorff distance (chordal) between the sampled point sets
    of two curve families."""
    pa = [z for c in curves_a for z in c.points]
    pb = [z for c in curves_b for z in c.points]
    d1 = max(min(chordal(a, b) for b in pb) for a in pa)
    d2 = max(min(chordal(a, b) for a in pa) for b in pb)
    return max(d1, d2)
