"""Fiber solving: all N solutions of B(z) = w, closed forms per family plus
a generic polynomial path, and assembly of annulus pre-image curves.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import MatchAmbiguityWarning, ParameterError
from .products import (
    BlaschkeProduct,
    PartialInfinite,
    Rotational,
    SinglePower,
    TwoRings,
    TwoZeros,
)
from .roots import aberth_roots, cluster_points, trim
from .sphere import INF, ExtComplex, as_ext, chordal, is_inf

__all__ = [
    "AnnulusSpec",
    "FiberSolution",
    "fiber_single_power",
    "fiber_two_zeros",
    "fiber_rotational",
    "fiber_two_rings",
    "fiber_generic",
    "closed_form_fiber",
    "annulus_preimage",
]


@dataclass(frozen=True)
class AnnulusSpec:
    """Radial band [rho_in, rho_out) with sampling counts for its pre-image."""

    rho_in: float
    rho_out: float
    phi_samples: int = 192
    rho_samples: int = 6

    def __post_init__(self):
        if not 0 <= self.rho_in < self.rho_out:
            raise ParameterError("need 0 <= rho_in < rho_out")
        if self.phi_samples < 8 or self.rho_samples < 1:
            raise ParameterError("sampling counts too small")

    def rho_values(self) -> np.ndarray:
        if self.rho_in == 0:
            return np.linspace(self.rho_out / 1024.0, self.rho_out, self.rho_samples)
        return np.geomspace(self.rho_in, self.rho_out, self.rho_samples)


@dataclass
class FiberSolution:
    """The full solution multiset of B(z) = w: exactly N sphere points
    (repeated at critical fibers) with per-root sheet indices."""

    w: ExtComplex
    roots: list[ExtComplex]
    sheets: list[int]

    def __post_init__(self):
        if len(self.roots) != len(self.sheets):
            raise ParameterError("roots and sheet indices must pair up")

    def finite_roots(self) -> list[complex]:
        return [complex(r) for r in self.roots if not is_inf(r)]


def _nth_roots(value: complex, n: int) -> list[complex]:
    mag = abs(value) ** (1.0 / n)
    base = cmath.phase(value) / n
    return [mag * cmath.exp(1j * (base + 2 * math.pi * k / n)) for k in range(n)]


# ---------------------------------------------------------------------------
# closed forms


def fiber_single_power(a: complex, n: int, rho: float, phi: float) -> FiberSolution:
    """Solutions of the single-zero power product over w = rho e^{i phi}:
    z_k = e^{i theta}(r - u_k)/(1 - r u_k) with u_k = rho^{1/n} e^{i(phi+2k pi)/n};
    satisfies the wrap rule z_k(rho, 2 pi) = z_{k+1}(rho, 0)."""
    SinglePower(a, n).validate()
    if rho < 0:
        raise ParameterError("rho must be non-negative")
    a = complex(a)
    r, th = abs(a), cmath.phase(a)
    e_th = cmath.exp(1j * th)
    roots: list[ExtComplex] = []
    for k in range(n):
        u = rho ** (1.0 / n) * cmath.exp(1j * (phi + 2 * math.pi * k) / n)
        den = 1.0 - r * u
        roots.append(INF if abs(den) < 1e-300 else as_ext(e_th * (r - u) / den))
    return FiberSolution(rho * cmath.exp(1j * phi), roots, list(range(n)))


def fiber_two_zeros(
    a1: complex, a2: complex, n: int, rho: float, phi: float
) -> FiberSolution:
    """2n solutions over w = rho e^{i phi} from the n sheet quadratics
    (1 - u_k r1 r2) e^{-i(th1+th2)} z^2 + [...] z + r1 r2 - u_k = 0."""
    TwoZeros(a1, a2, n).validate()
    if rho < 0:
        raise ParameterError("rho must be non-negative")
    a1, a2 = complex(a1), complex(a2)
    r1, r2 = abs(a1), abs(a2)
    th1, th2 = cmath.phase(a1), cmath.phase(a2)
    e1c, e2c = cmath.exp(-1j * th1), cmath.exp(-1j * th2)
    roots: list[ExtComplex] = []
    sheets: list[int] = []
    for k in range(n):
        u = rho ** (1.0 / n) * cmath.exp(1j * (phi + 2 * math.pi * k) / n)
        A = (1.0 - u * r1 * r2) * e1c * e2c
        Bc = (r1 * u - r2) * e1c + (r2 * u - r1) * e2c
        C = r1 * r2 - u
        scale = max(abs(A), abs(Bc), abs(C))
        if abs(A) < 1e-14 * scale:
            # u r1 r2 = 1: the quadratic degenerates, one root escapes to INF
            roots += [INF if Bc == 0 else as_ext(-C / Bc), INF]
        else:
            d = cmath.sqrt(Bc * Bc - 4.0 * A * C)
            if abs(-Bc + d) < abs(-Bc - d):
                d = -d
            qq = (-Bc + d) / 2.0
            roots += [as_ext(qq / A), as_ext(C / qq) if qq != 0 else as_ext(-Bc / A)]
        sheets += [k, n + k]
    return FiberSolution(rho * cmath.exp(1j * phi), roots, sheets)


def fiber_rotational(r: float, alpha: float, n: int, w: ExtComplex) -> FiberSolution:
    """n solutions of the rotationally symmetric product: z^n is a Moebius
    image of w, so the fiber is a full set of n-th roots."""
    Rotational(r, alpha, n).validate()
    ena = cmath.exp(1j * n * alpha)
    rn = r**n
    if is_inf(w):
        zn = ena / rn
    else:
        w = complex(w)
        den = 1.0 - rn * w
        if abs(den) < 1e-300:
            return FiberSolution(w, [INF] * n, list(range(n)))
        zn = ena * (rn - w) / den
    if zn == 0:
        return FiberSolution(w, [0j] * n, list(range(n)))
    roots = [as_ext(z) for z in _nth_roots(zn, n)]
    return FiberSolution(INF if is_inf(w) else w, roots, list(range(n)))


def fiber_two_rings(
    r1: float, alpha1: float, r2: float, alpha2: float, n: int, w: ExtComplex
) -> FiberSolution:
    """2n solutions for two rings: quadratic in u = z^n, then n-th roots."""
    TwoRings(r1, alpha1, r2, alpha2, n).validate()
    A1 = r1**n * cmath.exp(1j * n * alpha1)
    A2 = r2**n * cmath.exp(1j * n * alpha2)
    E = cmath.exp(-1j * n * (alpha1 + alpha2))
    if is_inf(w):
        us = [1.0 / A1.conjugate(), 1.0 / A2.conjugate()]
    else:
        w = complex(w)
        qa = E - w * A1.conjugate() * A2.conjugate()
        qb = -E * (A1 + A2) + w * (A1.conjugate() + A2.conjugate())
        qc = E * A1 * A2 - w
        scale = max(abs(qa), abs(qb), abs(qc))
        if abs(qa) < 1e-14 * scale:
            us = [(-qc / qb) if qb != 0 else None, None]
        else:
            d = cmath.sqrt(qb * qb - 4.0 * qa * qc)
            if abs(-qb + d) < abs(-qb - d):
                d = -d
            qq = (-qb + d) / 2.0
            us = [qq / qa, qc / qq if qq != 0 else -qb / qa]
    roots: list[ExtComplex] = []
    sheets: list[int] = []
    for i, u in enumerate(us):
        if u is None:
            roots += [INF] * n
        elif u == 0:
            roots += [0j] * n
        else:
            roots += [as_ext(z) for z in _nth_roots(u, n)]
        sheets += [i * n + k for k in range(n)]
    return FiberSolution(INF if is_inf(w) else w, roots, sheets)


# ---------------------------------------------------------------------------
# generic fiber


def fiber_generic(
    B: BlaschkeProduct, w: ExtComplex, cluster_tol: float = 1e-7
) -> FiberSolution:
    """The N roots of P(z) - w Q(z), Aberth-Ehrlich plus Newton polish on
    B(z) - w; near-coincident roots are merged to their centroid and
    reported with multiplicity."""
    N = B.degree
    if is_inf(w):
        roots = [as_ext(p) for p, m in B.poles() for _ in range(m)]
        return FiberSolution(INF, roots, list(range(N)))
    w = complex(w)
    if w == 0:
        roots = [as_ext(a) for a, m in B.zeros for _ in range(m)]
        return FiberSolution(0j, roots, list(range(N)))
    P, Q = B.as_rational()
    poly = P - w * Q
    core, n_zero, n_inf = trim(poly)
    found: list[ExtComplex] = [INF] * n_inf + [0j] * n_zero
    if len(core) > 1:
        raw = aberth_roots(core)
        for z in raw:
            z = complex(z)
            zp = _polish_fiber_root(B, z, w)
            found.append(as_ext(zp))
    finite = [complex(z) for z in found if not is_inf(z)]
    merged = cluster_points(finite, cluster_tol)
    roots: list[ExtComplex] = [INF] * (len(found) - len(finite))
    for c, m in merged:
        roots += [as_ext(c)] * m
    if len(roots) != N:
        raise ParameterError(f"fiber size {len(roots)} != degree {N}")
    return FiberSolution(w, roots, list(range(N)))


def _polish_fiber_root(B, z, w, steps: int = 3):
    goal = 1e-14 * max(abs(w), 1e-300)
    for _ in range(steps):
        f = B(z)
        if is_inf(f):
            return z
        err = f - w
        if abs(err) <= goal:
            return z
        try:
            d = B.derivative(z)
        except Exception:
            return z
        if abs(d) < 1e-12:
            return z
        step = err / d
        if abs(step) > 0.1 * (1.0 + abs(z)):
            return z
        z = z - step
    return z


def closed_form_fiber(B: BlaschkeProduct, w: ExtComplex) -> FiberSolution | None:
    """Dispatch to the family closed form when the product records one."""
    spec = B.family
    if isinstance(spec, SinglePower) and not is_inf(w):
        w = complex(w)
        return fiber_single_power(spec.a, spec.n, abs(w), cmath.phase(w))
    if isinstance(spec, TwoZeros) and not is_inf(w):
        w = complex(w)
        return fiber_two_zeros(spec.a1, spec.a2, spec.n, abs(w), cmath.phase(w))
    if isinstance(spec, Rotational):
        return fiber_rotational(spec.r, spec.alpha, spec.n, w)
    if isinstance(spec, TwoRings):
        return fiber_two_rings(spec.r1, spec.alpha1, spec.r2, spec.alpha2, spec.n, w)
    return None


def fiber(B: BlaschkeProduct, w: ExtComplex) -> FiberSolution:
    """Closed form when available, generic solver otherwise."""
    out = closed_form_fiber(B, w)
    return out if out is not None else fiber_generic(B, w)


# ---------------------------------------------------------------------------
# annulus pre-images


def annulus_preimage(B: BlaschkeProduct, spec: AnnulusSpec) -> list:
    """Closed pre-image curves of the circles |w| = rho for each sampled rho.

    Roots are matched across the phi sweep by optimal chordal assignment;
    a step where two matched roots approach within 1e-6 is refined (halving
    up to 10 times), then flagged and treated as a curve breakpoint.  The
    wrap permutation at phi = 2 pi stitches sheets into closed cycles.
    """
    from .domains import ParamCurve

    curves: list[ParamCurve] = []
    for rho in spec.rho_values():
        rho = float(rho)
        phis = np.linspace(0.0, 2.0 * math.pi, spec.phi_samples + 1)
        tracks, break_idx = _sweep_circle(B, rho, phis)
        cycles = _close_cycles(tracks)
        for ci, cycle in enumerate(cycles):
            samples: list[tuple[float, ExtComplex]] = []
            cut_positions: list[int] = []
            for leg, sheet in enumerate(cycle):
                for i, phi in enumerate(phis):
                    if leg > 0 and i == 0:
                        continue  # joint sample already present
                    if i in break_idx:
                        cut_positions.append(len(samples))
                    samples.append((leg * 2.0 * math.pi + float(phi), tracks[sheet][i]))
            for bi, piece in enumerate(_split_at(samples, cut_positions)):
                curves.append(
                    ParamCurve(
                        family="annulus",
                        branch=ci,
                        samples=piece,
                        rho=rho,
                        image_spec=("circle", rho),
                    )
                )
        if break_idx:
            warnings.warn(
                f"rho = {rho:g}: sheets met at {len(break_idx)} phi step(s); curves split",
                MatchAmbiguityWarning,
            )
    return curves


def _split_at(samples, positions):
    if not positions:
        return [samples]
    out = []
    last = 0
    for p in sorted(set(positions)):
        if p - last >= 2:
            out.append(samples[last:p])
        last = p
    if len(samples) - last >= 2:
        out.append(samples[last:])
    return out or [samples]


def _sweep_circle(B, rho, phis):
    N = B.degree
    tracks: list[list[ExtComplex]] = [[] for _ in range(N)]
    prev: list[ExtComplex] | None = None
    break_idx: set[int] = set()
    for i, phi in enumerate(phis):
        sol = fiber(B, rho * cmath.exp(1j * float(phi)))
        roots = list(sol.roots)
        if _fiber_has_multiplicity(roots):
            break_idx.add(i)
        if prev is None:
            order = roots
        else:
            order, ambiguous = _match_roots(prev, roots)
            if ambiguous:
                refined = _refine_match(B, rho, float(phis[i - 1]), float(phi), prev)
                if refined is None:
                    break_idx.add(i)
                else:
                    order = refined
        for j in range(N):
            tracks[j].append(order[j])
        prev = order
    return tracks, break_idx


def _fiber_has_multiplicity(roots, tol: float = 1e-7) -> bool:
    fin = [r for r in roots if not is_inf(r)]
    for i in range(len(fin)):
        for j in range(i + 1, len(fin)):
            if abs(fin[i] - fin[j]) <= tol:
                return True
    return len(roots) - len(fin) > 1


def _match_roots(prev, roots):
    """Optimal assignment of the new fiber to the previous one; ambiguous
    when some matched distance is comparable to its runner-up (the step
    straddles a near-collision)."""
    n = len(prev)
    cost = np.zeros((n, n))
    for i, p in enumerate(prev):
        for j, r in enumerate(roots):
            cost[i, j] = chordal(p, r)
    _, cols = linear_sum_assignment(cost)
    order = [roots[cols[i]] for i in range(n)]
    ambiguous = False
    for i in range(n):
        d = cost[i, cols[i]]
        others = np.delete(cost[i], cols[i])
        if len(others) and d > 1e-9 and d > 0.45 * others.min():
            ambiguous = True
            break
    return order, ambiguous


def _refine_match(B, rho, phi0, phi1, prev, depth: int = 0):
    """Halve the phi step until matching is unambiguous; None after 10 levels."""
    if depth >= 10:
        return None
    mid = 0.5 * (phi0 + phi1)
    order_mid, amb = _match_roots(prev, list(fiber(B, rho * cmath.exp(1j * mid)).roots))
    if amb:
        order_mid = _refine_match(B, rho, phi0, mid, prev, depth + 1)
        if order_mid is None:
            return None
    order_end, amb = _match_roots(
        order_mid, list(fiber(B, rho * cmath.exp(1j * phi1)).roots)
    )
    if amb:
        return _refine_match(B, rho, mid, phi1, order_mid, depth + 1)
    return order_end


def _close_cycles(tracks):
    """Cycles of the wrap permutation: sheet j continues as the sheet whose
    start matches j's end, paired by optimal assignment."""
    N = len(tracks)
    starts = [t[0] for t in tracks]
    ends = [t[-1] for t in tracks]
    cost = np.zeros((N, N))
    for j in range(N):
        for k in range(N):
            cost[j, k] = chordal(ends[j], starts[k])
    _, succ = linear_sum_assignment(cost)
    cycles = []
    seen = set()
    for j in range(N):
        if j in seen:
            continue
        cyc = [j]
        seen.add(j)
        k = int(succ[j])
        while k != j:
            cyc.append(k)
            seen.add(k)
            k = int(succ[k])
        cycles.append(cyc)
    return cycles
