"""Polynomial root machinery: Aberth-Ehrlich simultaneous iteration plus the
clustering and multiset-matching helpers the oracles are built from.

Coefficients are ascending throughout (c[0] + c[1] z + ...).
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import SolverConvergenceError
from .sphere import INF, chordal, is_inf

__all__ = [
    "polyval",
    "polyder",
    "trim",
    "aberth_roots",
    "cluster_points",
    "match_multisets",
]

MAX_SWEEPS = 500


def polyval(coeffs, z):
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def polyder(coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=complex)
    if len(coeffs) <= 1:
        return np.zeros(1, dtype=complex)
    return coeffs[1:] * np.arange(1, len(coeffs))


def trim(coeffs, rel_tol: float = 1e-13) -> tuple[np.ndarray, int, int]:
    """Strip leading/trailing coefficients that vanish relative to the largest.

    Returns (core, n_zero_roots, n_inf_roots): trailing near-zeros are exact
    roots at 0, leading near-zeros are roots at infinity of the projective
    polynomial.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    scale = np.max(np.abs(coeffs))
    if scale == 0:
        raise ValueError("zero polynomial")
    keep = np.abs(coeffs) > rel_tol * scale
    lo = int(np.argmax(keep))
    hi = len(coeffs) - int(np.argmax(keep[::-1]))
    return coeffs[lo:hi], lo, len(coeffs) - hi


def _initial_ring(deg: int) -> np.ndarray:
    # radius-1 ring, deterministically perturbed by 1e-3 to break symmetry
    j = np.arange(deg)
    radius = 1.0 + 1e-3 * np.cos(7.0 * j + 0.5)
    angle = 2.0 * np.pi * j / deg + 0.61803 + 1e-3 * np.sin(3.0 * j)
    return radius * np.exp(1j * angle)


def aberth_roots(coeffs, max_sweeps: int = MAX_SWEEPS, tol: float = 1e-14) -> np.ndarray:
    """All finite roots of the (pre-trimmed) polynomial by Aberth-Ehrlich
    iteration from a perturbed unit ring.  Raises SolverConvergenceError if
    the sweep budget is exhausted without the corrections settling."""
    coeffs = np.asarray(coeffs, dtype=complex)
    coeffs = coeffs / np.max(np.abs(coeffs))
    deg = len(coeffs) - 1
    if deg == 0:
        return np.zeros(0, dtype=complex)
    if deg == 1:
        return np.array([-coeffs[0] / coeffs[1]])
    dcoeffs = polyder(coeffs)
    z = _initial_ring(deg)
    for _ in range(max_sweeps):
        p = np.array([polyval(coeffs, zj) for zj in z])
        dp = np.array([polyval(dcoeffs, zj) for zj in z])
        w = np.where(dp != 0, p / dp, 0.1 + 0.1j)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        denom = 1.0 - w * s
        step = np.where(np.abs(denom) > 1e-300, w / denom, w)
        z = z - step
        if np.max(np.abs(step) / np.maximum(1.0, np.abs(z))) < tol:
            return z
    # accept late convergence when residuals are already at noise level
    res = max(abs(polyval(coeffs, zj)) for zj in z)
    if res < 1e-10:
        return z
    raise SolverConvergenceError(
        f"Aberth-Ehrlich did not converge in {max_sweeps} sweeps (residual {res:.2e})"
    )


def cluster_points(points, tol: float = 1e-7) -> list[tuple[complex, int]]:
    """Merge points within tol (single linkage) into (centroid, count) pairs."""
    pts = list(points)
    used = [False] * len(pts)
    out = []
    for i, p in enumerate(pts):
        if used[i]:
            continue
        group = [i]
        used[i] = True
        frontier = [i]
        while frontier:
            j = frontier.pop()
            for k in range(len(pts)):
                if not used[k] and abs(pts[k] - pts[j]) <= tol:
                    used[k] = True
                    group.append(k)
                    frontier.append(k)
        centroid = sum(pts[g] for g in group) / len(group)
        out.append((centroid, len(group)))
    return out


def match_multisets(found, expected) -> float:
    """Optimal pairing of two equal-size multisets of sphere points; returns
    the largest chordal distance in the pairing."""
    found = list(found)
    expected = list(expected)
    if len(found) != len(expected):
        raise ValueError(f"size mismatch {len(found)} vs {len(expected)}")
    n = len(found)
    cost = np.zeros((n, n))
    for i, f in enumerate(found):
        for j, e in enumerate(expected):
            cost[i, j] = chordal(f, e)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max()) if n else 0.0


def hausdorff_chordal(aset, bset) -> float:
    """Symmetric Hausdorff distance between two point sets in the chordal metric."""
    d1 = max(min(chordal(a, b) for b in bset) for a in aset)
    d2 = max(min(chordal(a, b) for a in aset) for b in bset)
    return max(d1, d2)
