"""Critical points (branch points) of Blaschke products.

Closed forms for the two-zeros and two-ring families, and a generic solver
that factors the derivative numerator into its known part (zeros and poles
carry multiplicity m-1) times a "free" polynomial whose simple roots are
located by Aberth-Ehrlich iteration and polished by Newton steps on B'.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateParameterWarning, ParameterError
from .products import BlaschkeProduct, Rotational, TwoRings, TwoZeros, build, roots_of_unity
from .roots import aberth_roots, cluster_points, polyder, trim
from .sphere import INF, ExtComplex, is_inf, reciprocal_conj

__all__ = [
    "CriticalSet",
    "critical_two_zeros",
    "critical_two_rings_aligned",
    "critical_two_rings_general",
    "critical_general",
    "free_critical_polynomial",
    "derivative_numerator",
    "two_rings_branch_constant",
]

CLUSTER_TOL = 1e-7


@dataclass
class CriticalSet:
    """Branch points of B on the sphere, split by the unit circle.

    ``interior`` and ``exterior`` hold (point, order) pairs; orders count the
    multiplicity of the point as a zero of B' (equivalently, local degree
    minus one).  ``images`` lists B at each interior entry.
    """

    interior: list[tuple[complex, int]]
    exterior: list[tuple[ExtComplex, int]]
    images: list[ExtComplex] = field(default_factory=list)

    def interior_count(self) -> int:
        return sum(m for _, m in self.interior)

    def exterior_count(self) -> int:
        return sum(m for _, m in self.exterior)

    def all_points(self) -> list[tuple[ExtComplex, int]]:
        return list(self.interior) + list(self.exterior)

    def origin_branch_order(self) -> int:
        """Multiplicity of 0 in the interior set (n-1 when the origin is a
        branch point of order n)."""
        for p, m in self.interior:
            if not is_inf(p) and abs(p) < 1e-9:
                return m
        return 0

    def interior_points(self) -> list[complex]:
        return [p for p, m in self.interior for _ in range(m)]


def _mirror(entries):
    return [(reciprocal_conj(p), m) for p, m in entries]


def _newton_polish_on_derivative(B: BlaschkeProduct, z: complex, steps: int = 2) -> complex:
    for _ in range(steps):
        try:
            d1 = B.derivative(z)
            d2 = B.second_derivative(z)
        except Exception:
            return z
        if abs(d2) < 1e-14:
            return z
        step = d1 / d2
        if abs(step) > 0.1 * (1 + abs(z)):
            return z
        z = z - step
    return z


# ---------------------------------------------------------------------------
# closed forms


def critical_two_zeros(a1: complex, a2: complex, n: int) -> CriticalSet:
    """Critical set of the product with zeros a1, a2 of multiplicity n each.

    The lone free critical point solves conj(q) z^2 + 2(1-|a1 a2|^2) z + q = 0
    with q = a1 a2 (conj(a1)+conj(a2)) - (a1+a2); the two solutions mirror
    each other in the unit circle, so exactly one lies inside.  Falls back to
    the generic solver (with a warning) when q vanishes.
    """
    spec = TwoZeros(a1, a2, n)
    spec.validate()
    a1, a2 = complex(a1), complex(a2)
    B = build(spec)
    q = a1 * a2 * (a1.conjugate() + a2.conjugate()) - (a1 + a2)
    if abs(q) < 1e-12:
        warnings.warn(
            "closed form degenerate (q = 0); using the generic solver",
            DegenerateParameterWarning,
        )
        return critical_general(B)
    p2 = abs(a1 * a2) ** 2
    s = cmath.sqrt((1.0 - p2) ** 2 - abs(q) ** 2)
    cands = [(p2 - 1.0 + s) / q.conjugate(), (p2 - 1.0 - s) / q.conjugate()]
    inside = [c for c in cands if abs(c) < 1.0]
    if not inside:
        raise ParameterError("no interior critical point found (unexpected)")
    if len(inside) == 2:
        inside.sort(key=lambda c: abs(B.derivative(_newton_polish_on_derivative(B, c))))
    b = _newton_polish_on_derivative(B, inside[0])
    interior: list[tuple[complex, int]] = []
    if n >= 2:
        interior += [(a1, n - 1), (a2, n - 1)]
    interior.append((b, 1))
    exterior = _mirror(interior)
    images = [B(p) for p, _ in interior]
    return CriticalSet(interior, exterior, images)


def critical_two_rings_aligned(r1: float, r2: float, alpha: float, n: int) -> CriticalSet:
    """Critical set for two aligned rings of zeros r1 e^{i a} w_k, r2 e^{i a} w_k.

    The free critical points sit on the zero rays at radii rho_{1,2} with
    rho1 rho2 = 1 and r1 < rho2 < r2; the origin (and its mirror, infinity)
    is a branch point of order n.
    """
    spec = TwoRings(r1, alpha, r2, alpha, n)
    spec.validate()
    B = build(spec)
    S = r1**n + r2**n
    p = r1**n * r2**n
    rad = math.sqrt((p + 1.0) ** 2 - S * S)
    rho1 = ((p + 1.0 + rad) / S) ** (1.0 / n)
    rho2 = ((p + 1.0 - rad) / S) ** (1.0 / n)
    e_alpha = cmath.exp(1j * alpha)
    ws = roots_of_unity(n)
    interior: list[tuple[complex, int]] = []
    if n >= 2:
        interior.append((0j, n - 1))
    interior += [(rho2 * e_alpha * w, 1) for w in ws]
    exterior: list[tuple[ExtComplex, int]] = []
    if n >= 2:
        exterior.append((INF, n - 1))
    exterior += [(rho1 * e_alpha * w, 1) for w in ws]
    images = [B(z) for z, _ in interior]
    return CriticalSet(interior, exterior, images)


def two_rings_branch_constant(r1: float, alpha1: float, r2: float, alpha2: float, n: int) -> complex:
    """Constant A of the two-ring branch-point equation
    z^{n-1} (conj(A) z^{2n} - 2 z^n + A) = 0."""
    a = r1 * cmath.exp(1j * alpha1)
    b = r2 * cmath.exp(1j * alpha2)
    an, bn = a**n, b**n
    return (an + bn - an * bn * (an.conjugate() + bn.conjugate())) / (
        1.0 - abs(a) ** (2 * n) * abs(b) ** (2 * n)
    )


def critical_two_rings_general(
    r1: float, alpha1: float, r2: float, alpha2: float, n: int
) -> CriticalSet:
    """Closed-form critical set for two rings with independent ray angles."""
    spec = TwoRings(r1, alpha1, r2, alpha2, n)
    spec.validate()
    B = build(spec)
    A = two_rings_branch_constant(r1, alpha1, r2, alpha2, n)
    rad = cmath.sqrt(4.0 - 4.0 * abs(A) ** 2)
    interior: list[tuple[complex, int]] = []
    exterior: list[tuple[ExtComplex, int]] = []
    if n >= 2:
        interior.append((0j, n - 1))
        exterior.append((INF, n - 1))
    for sign in (1.0, -1.0):
        u = (2.0 + sign * rad) / (2.0 * A.conjugate())
        mag = abs(u) ** (1.0 / n)
        base = cmath.phase(u) / n
        pts = [mag * cmath.exp(1j * (base + 2 * math.pi * k / n)) for k in range(n)]
        if abs(u) < 1.0:
            interior += [(_newton_polish_on_derivative(B, z), 1) for z in pts]
        else:
            exterior += [(z, 1) for z in pts]
    images = [B(z) for z, _ in interior]
    return CriticalSet(interior, exterior, images)


# ---------------------------------------------------------------------------
# generic path


def free_critical_polynomial(B: BlaschkeProduct) -> np.ndarray:
    """Ascending coefficients of S(z) = sum_k m_k (|a_k|^2 - 1)
    prod_{j != k} (a_j - z)(1 - conj(a_j) z).

    B' equals (prefactor) * prod (a_k - z)^{m_k-1} * S / prod (1 - conj(a_k) z)^{m_k+1},
    so S carries exactly the critical points that are not forced by zero or
    pole multiplicities.
    """
    zs = B.zeros
    D = len(zs)
    deg = 2 * (D - 1)
    total = np.zeros(deg + 1, dtype=complex)
    for k, (ak, mk) in enumerate(zs):
        term = np.array([mk * (abs(ak) ** 2 - 1.0) + 0j])
        for j, (aj, _) in enumerate(zs):
            if j == k:
                continue
            lin1 = np.array([aj, -1.0 + 0j])
            lin2 = np.array([1.0 + 0j, -aj.conjugate()])
            term = np.convolve(term, np.convolve(lin1, lin2))
        padded = np.zeros(deg + 1, dtype=complex)
        padded[: len(term)] = term
        total += padded
    return total


def derivative_numerator(B: BlaschkeProduct) -> np.ndarray:
    """Ascending coefficients of P'Q - PQ' from the rational form (degree
    at most 2N-2); kept as the raw cross-check companion of
    free_critical_polynomial."""
    P, Q = B.as_rational()
    dP, dQ = polyder(P), polyder(Q)
    a = np.convolve(dP, Q)
    b = np.convolve(P, dQ)
    m = max(len(a), len(b))
    out = np.zeros(m, dtype=complex)
    out[: len(a)] += a
    out[: len(b)] -= b
    return out


def critical_general(B: BlaschkeProduct, cluster_tol: float = CLUSTER_TOL) -> CriticalSet:
    """All 2N-2 critical points of B on the sphere, with multiplicity.

    Zeros and poles contribute multiplicity m-1 analytically; the free part
    comes from Aberth-Ehrlich on S (after stripping exact factors z^k and the
    degree deficiency, which belong to 0 and INF), then two Newton polishing
    steps on B' and a final merge of coincident points.
    """
    N = B.degree
    if N < 2:
        return CriticalSet([], [], [])
    S = free_critical_polynomial(B)
    core, n_zero, n_inf = trim(S)
    free_roots = [complex(z) for z in aberth_roots(core)] if len(core) > 1 else []
    free_roots = [_newton_polish_on_derivative(B, z) for z in free_roots]

    entries: list[tuple[ExtComplex, int]] = []
    for a, m in B.zeros:
        if m >= 2:
            entries.append((a, m - 1))
    for p, m in B.poles():
        if m >= 2:
            entries.append((p, m - 1))
    if n_zero:
        entries.append((0j, n_zero))
    if n_inf:
        entries.append((INF, n_inf))
    entries += [(z, 1) for z in free_roots]

    finite = [(p, m) for p, m in entries if not is_inf(p)]
    inf_mult = sum(m for p, m in entries if is_inf(p))
    flat = [p for p, m in finite for _ in range(m)]
    merged = cluster_points(flat, cluster_tol)

    interior = [(p, m) for p, m in merged if abs(p) < 1.0]
    exterior: list[tuple[ExtComplex, int]] = [(p, m) for p, m in merged if abs(p) >= 1.0]
    if inf_mult:
        exterior.append((INF, inf_mult))

    total = sum(m for _, m in interior) + sum(m for _, m in exterior)
    if total != 2 * N - 2:
        raise ParameterError(
            f"critical count {total} != 2N-2 = {2 * N - 2}; ill-conditioned input"
        )
    images = [B(p) for p, _ in interior]
    return CriticalSet(interior, exterior, images)
