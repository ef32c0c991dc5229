"""Covering (deck) transformation groups for each product family.

Single-zero products get a cyclic group of honest Moebius maps.  The other
families mix Moebius elements with algebraic branch maps; those are realized
so that the composition laws hold pointwise almost everywhere:

* two rings: S_j(z) = w_j z ((M(z^n)/z^n))^{1/n} with the principal root,
  where M is the Moebius involution tying zeta^n to z^n.  Equivariance under
  rotations makes S_j . S_k = T_{j+k} exact off a measure-zero cut.
* two zeros: S_k(z) is the root of the degree-2 fiber equation that lies in
  the same radial basin as z, where the basin label is found by lifting the
  factor value radially down to the zeros.  The Moebius involution U swaps
  basins, so U . S_k = T_k and S_k . S_j = S_{k+j} hold a.e.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BranchAmbiguityError, ParameterError
from .products import (
    BlaschkeProduct,
    Rotational,
    SinglePower,
    TwoRings,
    TwoZeros,
    build,
    roots_of_unity,
)
from .sphere import INF, ExtComplex, Mobius, as_ext, chordal, is_inf

__all__ = [
    "CoverGroup",
    "Transform",
    "group_single_power",
    "group_two_zeros",
    "group_two_rings_aligned",
    "group_two_rings_general",
    "involution_u",
    "single_power_deck",
]

Transform = Callable[[ExtComplex], ExtComplex]


@dataclass
class CoverGroup:
    """A finite set of evaluable transforms with B o g = B.

    ``elements`` maps names to transforms; ``table`` gives the composition
    law name x name -> name; ``order`` is the numerically confirmed element
    count (fingerprint closure).
    """

    family: str
    product: BlaschkeProduct
    generators: dict[str, Transform]
    elements: dict[str, Transform]
    table: dict[tuple[str, str], str]
    order: int
    notes: str = ""

    def check_closure(self, points, tol: float = 1e-8) -> bool:
        """Confirm numerically that composing any two elements lands on the
        table's entry at the given sample points."""
        for (n1, n2), n3 in self.table.items():
            g1, g2, g3 = self.elements[n1], self.elements[n2], self.elements[n3]
            for z in points:
                if chordal(g1(g2(z)), g3(z)) > tol:
                    return False
        return True


def _fingerprint_order(elements: dict[str, Transform], points) -> int:
    """Count distinct elements by value fingerprints at sample points."""
    seen = []
    for g in elements.values():
        fp = tuple(g(z) for z in points)
        if not any(
            all(chordal(a, b) <= 1e-8 for a, b in zip(fp, other)) for other in seen
        ):
            seen.append(fp)
    return len(seen)


def _law_table(n: int) -> dict[tuple[str, str], str]:
    """Composition table of the order-2n group {S_k, T_k}: S.S = S, S.T = T.S = T,
    T.T = S, indices adding mod n."""
    table = {}
    for i in range(n):
        for j in range(n):
            table[(f"S{i}", f"S{j}")] = f"S{(i + j) % n}"
            table[(f"S{i}", f"T{j}")] = f"T{(i + j) % n}"
            table[(f"T{i}", f"S{j}")] = f"T{(i + j) % n}"
            table[(f"T{i}", f"T{j}")] = f"S{(i + j) % n}"
    return table


_FINGERPRINT_POINTS = [
    0.31 + 0.22j,
    -0.57 + 0.41j,
    1.62 - 0.35j,
    -0.12 - 1.31j,
    0.05 + 0.91j,
    2.4 + 1.1j,
    -0.8 - 0.2j,
    0.45 - 0.66j,
]


# ---------------------------------------------------------------------------
# single zero of multiplicity n: cyclic Moebius group


def single_power_deck(a: complex, n: int, k: int) -> Mobius:
    """k-th deck transformation of the n-th power single-zero product."""
    w = cmath.exp(2j * math.pi * k / n)
    aa = abs(a) ** 2
    return Mobius(-(aa - w), a * (1.0 - w), -a.conjugate() * (1.0 - w), 1.0 - aa * w)


def group_single_power(a: complex, n: int) -> CoverGroup:
    spec = SinglePower(a, n)
    spec.validate()
    B = build(spec)
    maps = {f"T{k}": single_power_deck(a, n, k) for k in range(n)}
    table = {
        (f"T{i}", f"T{j}"): f"T{(i + j) % n}" for i in range(n) for j in range(n)
    }
    order = _fingerprint_order(maps, _FINGERPRINT_POINTS)
    return CoverGroup(
        family="single_power",
        product=B,
        generators={"T1": maps.get("T1", maps["T0"])},
        elements=dict(maps),
        table=table,
        order=order,
        notes=f"cyclic of order {n}",
    )


# ---------------------------------------------------------------------------
# two zeros of equal multiplicity: U (Moebius) + sheeted quadratic branches


def involution_u(a1: complex, a2: complex) -> Mobius:
    """The Moebius involution exchanging the two quadratic-fiber sheets;
    sends a1 <-> a2 and 1/conj(a1) <-> 1/conj(a2)."""
    A = (a1 * a2 * (a1.conjugate() + a2.conjugate()) - (a1 + a2)) / (
        abs(a1 * a2) ** 2 - 1.0
    )
    return Mobius(-1.0, A, -A.conjugate(), 1.0)


class _QuadraticFiber:
    """Shared machinery for the degree-2 factor map phi(z) =
    (a1-z)(a2-z)/((1-conj(a1) z)(1-conj(a2) z)) and its radial basin labels."""

    def __init__(self, a1: complex, a2: complex):
        self.a1, self.a2 = complex(a1), complex(a2)
        self.c1, self.c2 = self.a1.conjugate(), self.a2.conjugate()
        self._labels: dict[complex, int] = {}

    def phi(self, z: ExtComplex) -> ExtComplex:
        if is_inf(z):
            return 1.0 / (self.c1 * self.c2)
        num = (self.a1 - z) * (self.a2 - z)
        den = (1.0 - self.c1 * z) * (1.0 - self.c2 * z)
        if den == 0:
            return INF
        return num / den

    def roots_at(self, s: ExtComplex) -> list[ExtComplex]:
        """Both solutions of phi(zeta) = s, as sphere points."""
        if is_inf(s):
            return [1.0 / self.c1, 1.0 / self.c2]
        A = 1.0 - s * self.c1 * self.c2
        Bc = s * (self.c1 + self.c2) - (self.a1 + self.a2)
        C = self.a1 * self.a2 - s
        if abs(A) < 1e-14 * max(1.0, abs(Bc), abs(C)):
            return [(-C / Bc) if Bc != 0 else INF, INF]
        d = cmath.sqrt(Bc * Bc - 4.0 * A * C)
        if abs(-Bc + d) < abs(-Bc - d):
            d = -d
        qq = (-Bc + d) / 2.0
        r1 = qq / A
        r2 = C / qq if qq != 0 else -Bc / A
        return [r1, r2]

    def basin(self, z: ExtComplex, steps: int = 24, depth: int = 0) -> int:
        """1 or 2: which zero the lift of the radial value path ends at.

        Tracking restarts with a doubled step count whenever the selected
        root is not clearly nearest (the path ran close to the critical
        fiber); six doublings without separation raise BranchAmbiguityError.
        """
        if is_inf(z):
            z = 1e9 + 0j
        z = complex(z)
        key = z
        if key in self._labels:
            return self._labels[key]
        if abs(z - self.a1) < 1e-12:
            return 1
        if abs(z - self.a2) < 1e-12:
            return 2
        s0 = self.phi(z)
        if is_inf(s0) or abs(s0) > 1e14:
            # step off the pole first
            return self.basin(z * (1.0 - 1e-9), steps, depth)
        cur = z
        n_steps = steps * (2**depth)
        for i in range(1, n_steps + 1):
            s = s0 * (1.0 - i / n_steps)
            r = self.roots_at(s)
            d = [chordal(c, cur) for c in r]
            best = 0 if d[0] <= d[1] else 1
            ambiguous = d[best] > 0.45 * d[1 - best] and d[best] > 1e-10
            if ambiguous:
                if depth >= 6:
                    raise BranchAmbiguityError(
                        f"radial lift from {z} meets the critical fiber"
                    )
                return self.basin(z, steps, depth + 1)
            cur = r[best]
            if is_inf(cur):
                cur = 1e12 + 0j
        lab = 1 if abs(cur - self.a1) <= abs(cur - self.a2) else 2
        self._labels[key] = lab
        return lab


class SheetedQuadraticBranch:
    """S_k (or its U-twist T_k) for the two-zeros family: the solution of
    phi(zeta) = w_k phi(z) lying in the requested radial basin."""

    def __init__(self, fiber: _QuadraticFiber, n: int, k: int, twisted: bool):
        self.fiber = fiber
        self.n = n
        self.k = k
        self.twisted = twisted
        self.omega = cmath.exp(2j * math.pi * k / n)

    def __call__(self, z: ExtComplex) -> ExtComplex:
        f = self.fiber
        s = f.phi(z)
        if is_inf(s):
            roots = f.roots_at(INF)
        else:
            roots = f.roots_at(s * self.omega)
        finite = [r for r in roots if not is_inf(r)]
        if len(finite) == 2 and abs(finite[0] - finite[1]) < 1e-9:
            raise BranchAmbiguityError(
                f"sheets coincide over z = {z}; branch undetermined"
            )
        want = f.basin(z)
        if self.twisted:
            want = 3 - want
        # the two roots are U-partners, so their basin labels always differ
        pick = roots[0] if f.basin(roots[0]) == want else roots[1]
        return INF if is_inf(pick) else as_ext(pick)


def group_two_zeros(a1: complex, a2: complex, n: int) -> CoverGroup:
    spec = TwoZeros(a1, a2, n)
    spec.validate()
    B = build(spec)
    fiber = _QuadraticFiber(a1, a2)
    U = involution_u(a1, a2)
    elements: dict[str, Transform] = {}
    for k in range(n):
        elements[f"S{k}"] = SheetedQuadraticBranch(fiber, n, k, twisted=False)
        elements[f"T{k}"] = SheetedQuadraticBranch(fiber, n, k, twisted=True)
    order = _fingerprint_order(elements, _FINGERPRINT_POINTS)
    return CoverGroup(
        family="two_zeros",
        product=B,
        generators={"U": U, "S1": elements["S1" if n > 1 else "S0"]},
        elements=elements,
        table=_law_table(n),
        order=order,
        notes="T0 coincides with U; S0 is the identity",
    )


# ---------------------------------------------------------------------------
# ring families: rotations + equivariant n-th root branches


def _principal_root(x: complex, n: int) -> complex:
    return abs(x) ** (1.0 / n) * cmath.exp(1j * cmath.phase(x) / n)


class EquivariantRootBranch:
    """S_j(z) = w_j z (M(z^n)/z^n)^{1/n} with principal root; M an involution.

    Commutes with the rotations T_k exactly, so S_j . S_k = T_{j+k} holds
    everywhere except the measure-zero locus arg(M(z^n)/z^n) = pi.  Values at
    the exceptional points 0 and INF are pinned explicitly.
    """

    def __init__(self, mu: Mobius, n: int, j: int, at_zero: complex, at_inf: complex):
        self.mu = mu
        self.n = n
        self.j = j
        self.omega = cmath.exp(2j * math.pi * j / n)
        self.at_zero = at_zero
        self.at_inf = at_inf

    def __call__(self, z: ExtComplex) -> ExtComplex:
        if is_inf(z):
            return self.at_inf
        z = complex(z)
        if z == 0:
            return self.at_zero
        if abs(z) > 1e18:
            return self.at_inf
        u = z**self.n
        mu_u = self.mu(u)
        if is_inf(mu_u):
            # z^n at the pole of M: image is INF
            return INF
        ratio = complex(mu_u) / u
        if ratio == 0:
            return 0j
        return self.omega * z * _principal_root(ratio, self.n)


def _ring_group(
    B: BlaschkeProduct,
    mu: Mobius,
    n: int,
    pin_zero: complex,
    pin_inf: complex,
    family: str,
    notes: str,
) -> CoverGroup:
    ws = roots_of_unity(n)
    elements: dict[str, Transform] = {}
    for j in range(n):
        elements[f"T{j}"] = Mobius(ws[j], 0, 0, 1)
        elements[f"S{j}"] = EquivariantRootBranch(
            mu, n, j, pin_zero * ws[j], pin_inf * ws[j]
        )
    order = _fingerprint_order(elements, _FINGERPRINT_POINTS)
    return CoverGroup(
        family=family,
        product=B,
        generators={"T1": elements["T1" if n > 1 else "T0"], "S0": elements["S0"]},
        elements=elements,
        table=_law_table(n),
        order=order,
        notes=notes,
    )


def group_two_rings_aligned(r1: float, r2: float, alpha: float, n: int) -> CoverGroup:
    spec = TwoRings(r1, alpha, r2, alpha, n)
    spec.validate()
    B = build(spec)
    S = r1**n + r2**n
    p = r1**n * r2**n
    ena = cmath.exp(1j * n * alpha)
    mu = Mobius(1.0 + p, -S * ena, S / ena, -(1.0 + p))
    rho0 = (S / (1.0 + p)) ** (1.0 / n)
    e_alpha = cmath.exp(1j * alpha)
    return _ring_group(
        B,
        mu,
        n,
        pin_zero=rho0 * e_alpha,
        pin_inf=e_alpha / rho0,
        family="two_rings",
        notes="aligned rings; S_j(0) on the zero rays",
    )


def group_two_rings_general(
    r1: float, alpha1: float, r2: float, alpha2: float, n: int
) -> CoverGroup:
    spec = TwoRings(r1, alpha1, r2, alpha2, n)
    spec.validate()
    B = build(spec)
    from .critical import two_rings_branch_constant

    A = two_rings_branch_constant(r1, alpha1, r2, alpha2, n)
    mu = Mobius(1.0, -A, A.conjugate(), -1.0)
    pin_zero = _principal_root(A, n)
    pin_inf = _principal_root(1.0 / A.conjugate(), n)
    return _ring_group(
        B,
        mu,
        n,
        pin_zero=pin_zero,
        pin_inf=pin_inf,
        family="two_rings_general",
        notes="principal-branch pinning at 0 and INF",
    )


def rotation_group(n: int) -> list[Mobius]:
    """The rotations z -> w_k z; deck transformations of any rotationally
    symmetric product of order n."""
    return [Mobius(w, 0, 0, 1) for w in roots_of_unity(n)]
