"""Finite Blaschke products: construction of the supported zero families,
evaluation on the sphere, analytic derivatives, and rational (P/Q) form.

Every factor uses the unimodular prefactor conj(a)/|a|, so a factor at a
real positive zero is positive at the origin.  Zeros are stored with
multiplicities; the total degree N is the multiplicity sum.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ParameterError, PoleInputError
from .sphere import INF, ExtComplex, as_ext, is_inf

__all__ = [
    "BlaschkeProduct",
    "SinglePower",
    "TwoZeros",
    "Rotational",
    "TwoRings",
    "PartialInfinite",
    "FamilySpec",
    "build",
    "cube_cluster_zeros",
    "roots_of_unity",
]

POLE_TOL = 1e-13
POLE_SNAP = 1e-14


def roots_of_unity(n: int) -> list[complex]:
    return [cmath.exp(2j * math.pi * k / n) for k in range(n)]


# ---------------------------------------------------------------------------
# family specs


@dataclass(frozen=True)
class SinglePower:
    """One zero of multiplicity n."""

    a: complex
    n: int

    def validate(self):
        if not 0 < abs(self.a) < 1:
            raise ParameterError("zero must lie in the punctured open unit disk")
        if self.n < 1:
            raise ParameterError("power must be >= 1")


@dataclass(frozen=True)
class TwoZeros:
    """Two distinct zeros, each of multiplicity n."""

    a1: complex
    a2: complex
    n: int

    def validate(self):
        for a in (self.a1, self.a2):
            if not 0 < abs(a) < 1:
                raise ParameterError("zeros must lie in the punctured open unit disk")
        if self.a1 == self.a2:
            raise ParameterError("zeros must be distinct")
        if self.n < 1:
            raise ParameterError("power must be >= 1")


@dataclass(frozen=True)
class Rotational:
    """n simple zeros r e^{i alpha} w_k over the n-th roots of unity w_k."""

    r: float
    alpha: float
    n: int

    def validate(self):
        if not 0 < self.r < 1:
            raise ParameterError("radius must satisfy 0 < r < 1")
        if self.n < 1:
            raise ParameterError("order must be >= 1")


@dataclass(frozen=True)
class TwoRings:
    """Two rotationally symmetric rings of n simple zeros each."""

    r1: float
    alpha1: float
    r2: float
    alpha2: float
    n: int

    def validate(self):
        if not (0 < self.r1 <= self.r2 < 1):
            raise ParameterError("radii must satisfy 0 < r1 <= r2 < 1")
        if self.n < 1:
            raise ParameterError("order must be >= 1")

    @property
    def aligned(self) -> bool:
        return (self.alpha1 - self.alpha2) % (2 * math.pi) == 0


@dataclass(frozen=True)
class PartialInfinite:
    """First m factors of an infinite product, ordered by non-decreasing
    zero modulus.  The default sequence clusters at the cube roots of unity:
    [1 - 1/(j+1)^2] w_k for j = 1, 2, ... and w_k the cube roots of unity.
    """

    m: int
    sequence: Callable[[int], Sequence[complex]] | None = None

    def validate(self):
        if self.m < 1:
            raise ParameterError("need at least one factor")

    def zeros(self) -> list[complex]:
        gen = self.sequence or cube_cluster_zeros
        zs = list(gen(self.m))
        if len(zs) != self.m:
            raise ParameterError("sequence rule returned wrong count")
        zs.sort(key=lambda z: (abs(z), cmath.phase(z)))
        return zs


FamilySpec = SinglePower | TwoZeros | Rotational | TwoRings | PartialInfinite


def cube_cluster_zeros(m: int) -> list[complex]:
    """First m zeros of the sequence [1 - 1/(j+1)^2] w_k, grouped by ring."""
    out = []
    j = 1
    while len(out) < m:
        s = 1.0 - 1.0 / (j + 1) ** 2
        for w in roots_of_unity(3):
            out.append(s * w)
            if len(out) == m:
                break
        j += 1
    return out


# ---------------------------------------------------------------------------
# the product


@dataclass(frozen=True)
class BlaschkeProduct:
    """A finite Blaschke product given by its zero multiset.

    ``zeros`` is a tuple of (zero, multiplicity) pairs with every zero in the
    punctured open unit disk.  ``family`` records the spec the product was
    built from, when known; closed-form fiber/boundary code uses it to pick
    fast paths, and it never affects evaluation.
    """

    zeros: tuple[tuple[complex, int], ...]
    family: FamilySpec | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.zeros:
            raise ParameterError("a Blaschke product needs at least one zero")
        canon = []
        for a, m in self.zeros:
            a = complex(a)
            if not 0 < abs(a) < 1:
                raise ParameterError(
                    "every zero must lie in the punctured open unit disk"
                )
            if m < 1 or m != int(m):
                raise ParameterError("multiplicities must be positive integers")
            canon.append((a, int(m)))
        object.__setattr__(self, "zeros", tuple(canon))

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.zeros)

    def zero_list(self) -> list[complex]:
        """Zeros repeated by multiplicity."""
        return [a for a, m in self.zeros for _ in range(m)]

    def poles(self) -> list[tuple[complex, int]]:
        return [(1.0 / a.conjugate(), m) for a, m in self.zeros]

    def prefactor(self, a: complex) -> complex:
        return a.conjugate() / abs(a)

    # -- evaluation ---------------------------------------------------------

    def eval_grid(self, Z: np.ndarray) -> np.ndarray:
        """Evaluate on an array of finite points.  Poles come back as complex
        inf; every other entry is the finite product value.

        Complex arithmetic is spelled out in float64 ops so the result is a
        fixed sequence of IEEE operations: scalar and bulk evaluation agree
        bit for bit, and the output is independent of any row partitioning.
        """
        Z = np.asarray(Z, dtype=np.complex128)
        zr = np.ascontiguousarray(Z.real)
        zi = np.ascontiguousarray(Z.imag)
        wr = np.ones_like(zr)
        wi = np.zeros_like(zi)
        with np.errstate(divide="ignore", invalid="ignore"):
            for a, m in self.zeros:
                p = self.prefactor(a)
                nr = a.real - zr
                ni = a.imag - zi
                dr = 1.0 - (a.real * zr + a.imag * zi)
                di = a.imag * zr - a.real * zi
                d2 = dr * dr + di * di
                rr = (nr * dr + ni * di) / d2
                ri = (ni * dr - nr * di) / d2
                fr = p.real * rr - p.imag * ri
                fi = p.real * ri + p.imag * rr
                for _ in range(m):
                    wr, wi = wr * fr - wi * fi, wr * fi + wi * fr
        out = wr + 1j * wi
        bad = ~np.isfinite(wr) | ~np.isfinite(wi)
        for p, _ in self.poles():
            # snap floating-point hits of the poles to the INF marker
            tol = POLE_SNAP * max(1.0, abs(p))
            bad |= np.abs(Z - p) <= tol
        if bad.any():
            out = np.where(bad, complex(np.inf, 0.0), out)
        return out

    def __call__(self, z: ExtComplex) -> ExtComplex:
        if is_inf(z):
            # per-factor limit is pref/conj(a) = 1/|a|
            v = 1.0 + 0j
            for a, m in self.zeros:
                v *= (1.0 / abs(a)) ** m
            return v
        z = as_ext(z)
        if is_inf(z):
            return self(INF)
        out = self.eval_grid(np.array([z]))[0]
        if not (math.isfinite(out.real) and math.isfinite(out.imag)):
            return INF
        return complex(out)

    def derivative(self, z: complex) -> complex:
        """Analytic derivative from the factored product rule; exact at zeros
        (nonzero there when the zero is simple).  Rejects points within
        1e-13 of a pole."""
        if is_inf(z):
            raise PoleInputError("derivative is defined for finite arguments only")
        z = complex(z)
        for pole, _ in self.poles():
            if abs(z - pole) < POLE_TOL:
                raise PoleInputError(f"z within {POLE_TOL} of pole {pole}")
        # d/dz of factor_k is pref * (|a|^2 - 1)/(1 - conj(a) z)^2; then
        # B' = sum_k m_k f_k^(m_k - 1) f_k' prod_{j != k} f_j^(m_j)
        facs = []
        dfacs = []
        for a, m in self.zeros:
            p = self.prefactor(a)
            den = 1.0 - a.conjugate() * z
            facs.append(p * (a - z) / den)
            dfacs.append(p * (abs(a) ** 2 - 1.0) / (den * den))
        total = 0j
        for k, (a, m) in enumerate(self.zeros):
            term = m * dfacs[k] * facs[k] ** (m - 1)
            for j, (_, mj) in enumerate(self.zeros):
                if j != k:
                    term *= facs[j] ** mj
            total += term
        return total

    def second_derivative(self, z: complex, h: float = 1e-5) -> complex:
        """Central difference of the analytic derivative; adequate for Newton
        polishing of critical points."""
        return (self.derivative(z + h) - self.derivative(z - h)) / (2 * h)

    # -- rational form ------------------------------------------------------

    def as_rational(self) -> tuple[np.ndarray, np.ndarray]:
        """Coefficients (ascending) of P, Q with B = P/Q and deg P = deg Q = N."""
        P = np.array([1.0 + 0j])
        Q = np.array([1.0 + 0j])
        for a, m in self.zeros:
            p = self.prefactor(a)
            num = np.array([p * a, -p])
            den = np.array([1.0 + 0j, -a.conjugate()])
            for _ in range(m):
                P = np.convolve(P, num)
                Q = np.convolve(Q, den)
        return P, Q


def build(spec: FamilySpec) -> BlaschkeProduct:
    """Construct the product for a family spec; rejects invalid parameters."""
    spec.validate()
    if isinstance(spec, SinglePower):
        zeros = [(complex(spec.a), spec.n)]
    elif isinstance(spec, TwoZeros):
        zeros = [(complex(spec.a1), spec.n), (complex(spec.a2), spec.n)]
    elif isinstance(spec, Rotational):
        base = spec.r * cmath.exp(1j * spec.alpha)
        zeros = [(base * w, 1) for w in roots_of_unity(spec.n)]
    elif isinstance(spec, TwoRings):
        b1 = spec.r1 * cmath.exp(1j * spec.alpha1)
        b2 = spec.r2 * cmath.exp(1j * spec.alpha2)
        ws = roots_of_unity(spec.n)
        zs: dict[complex, int] = {}
        for w in ws:
            for b in (b1 * w, b2 * w):
                zs[b] = zs.get(b, 0) + 1
        zeros = sorted(zs.items(), key=lambda t: (abs(t[0]), cmath.phase(t[0])))
    elif isinstance(spec, PartialInfinite):
        zeros = [(a, 1) for a in spec.zeros()]
    else:
        raise ParameterError(f"unknown family spec {type(spec).__name__}")
    return BlaschkeProduct(tuple(zeros), family=spec)
