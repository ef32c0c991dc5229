"""Extended complex plane: the point at infinity, the chordal metric, and
Moebius transformations with Riemann-sphere conventions.

Finite points are plain ``complex``; the point at infinity is the singleton
``INF``.  All maps in this package are total on the sphere, so poles are
first-class values rather than exceptions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ParameterError

__all__ = [
    "INF",
    "ExtComplex",
    "as_ext",
    "is_inf",
    "reciprocal_conj",
    "chordal",
    "chordal_many",
    "Mobius",
]


class _Infinity:
    """The single point at infinity of the Riemann sphere."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

ExtComplex = complex | _Infinity


def is_inf(z) -> bool:
    return z is INF or isinstance(z, _Infinity)


def as_ext(z) -> ExtComplex:
    """Validate a value as a sphere point. NaN components are rejected;
    non-finite complex values collapse to INF."""
    if is_inf(z):
        return INF
    z = complex(z)
    if math.isnan(z.real) or math.isnan(z.imag):
        raise ParameterError("NaN is not a point of the sphere")
    if math.isinf(z.real) or math.isinf(z.imag):
        return INF
    return z


def reciprocal_conj(z: ExtComplex) -> ExtComplex:
    """Mirror in the unit circle: z -> 1/conj(z), exchanging 0 and INF."""
    if is_inf(z):
        return 0j
    z = complex(z)
    if z == 0:
        return INF
    return 1.0 / z.conjugate()


def chordal(z: ExtComplex, w: ExtComplex) -> float:
    """Chordal (spherical) distance; finite on all of the sphere, max 2."""
    zi, wi = is_inf(z), is_inf(w)
    if zi and wi:
        return 0.0
    if zi or wi:
        f = w if zi else z
        a = abs(complex(f))
        if a > 1e12:
            return 2.0 / a  # avoids overflow in a*a
        return 2.0 / math.sqrt(1.0 + a * a)
    z, w = complex(z), complex(w)
    az, aw = abs(z), abs(w)
    if max(az, aw) > 1e8:
        # the metric is invariant under the mirror z -> 1/conj(z)
        return chordal(reciprocal_conj(z), reciprocal_conj(w))
    return 2.0 * abs(z - w) / math.sqrt((1.0 + az * az) * (1.0 + aw * aw))


def chordal_many(zs, ws) -> float:
    """Max chordal distance over paired iterables."""
    return max(chordal(z, w) for z, w in zip(zs, ws, strict=True))


_DEGENERACY_TOL = 1e-14


@dataclass(frozen=True)
class Mobius:
    """The map z -> (a z + b)/(c z + d) on the sphere.

    Conventions: INF -> a/c, and the pole -d/c -> INF.  Construction rejects
    coefficient tuples whose determinant is zero relative to the largest
    coefficient magnitude.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        m = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        if m == 0 or abs(self.det) <= _DEGENERACY_TOL * m * m:
            raise ParameterError("degenerate Moebius coefficients")

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def __call__(self, z: ExtComplex) -> ExtComplex:
        if is_inf(z):
            if self.c == 0:
                return INF
            return self.a / self.c
        z = complex(z)
        den = self.c * z + self.d
        if den == 0:
            return INF
        out = (self.a * z + self.b) / den
        return as_ext(out)

    def compose(self, other: "Mobius") -> "Mobius":
        """self after other, normalized so the largest coefficient has modulus 1."""
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        return Mobius(a, b, c, d).normalized()

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def normalized(self) -> "Mobius":
        m = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        return Mobius(self.a / m, self.b / m, self.c / m, self.d / m)

    def same_map(self, other: "Mobius", tol: float = 1e-12) -> bool:
        """Projective equality: equal as maps, i.e. coefficients match up to
        one global scalar (fitted by least squares, so ties in coefficient
        magnitude cannot skew the alignment)."""
        u = self.normalized()
        v = other.normalized()
        uu = (u.a, u.b, u.c, u.d)
        vv = (v.a, v.b, v.c, v.d)
        lam = sum(y * x.conjugate() for x, y in zip(uu, vv)) / sum(
            abs(x) ** 2 for x in uu
        )
        return all(abs(y - lam * x) <= tol for x, y in zip(uu, vv))

    @staticmethod
    def identity() -> "Mobius":
        return Mobius(1, 0, 0, 1)
