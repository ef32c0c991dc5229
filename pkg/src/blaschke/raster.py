"""Deterministic raster rendering with annulus-band domain coloring.

Target-plane mode paints w-plane points directly; pre-image mode paints each
z by the color of B(z), so pre-image pixels are bit-equal to evaluating and
coloring their centers.  All per-pixel math is elementwise float64, which
makes the output independent of row partitioning (thread count).
"""

from __future__ import annotations

import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ResolutionGuardError
from .products import BlaschkeProduct
from .sphere import ExtComplex, is_inf

__all__ = [
    "AnnulusScheme",
    "MeshSpec",
    "RasterScene",
    "default_scheme",
    "color_of",
    "render",
    "write_png",
    "write_ppm",
]

PIXEL_GUARD = 64_000_000
GRAY = (128, 128, 128)


@dataclass(frozen=True)
class AnnulusScheme:
    """Ordered non-overlapping radial bands, one hue per band; saturation
    follows the argument (counterclockwise), brightness the modulus
    (log within a band; linear when the band starts at 0, reciprocal on an
    unbounded final band)."""

    bands: tuple[tuple[float, float, float], ...]  # (rho_in, rho_out, hue_deg)
    s_range: tuple[float, float] = (0.25, 1.0)
    v_range: tuple[float, float] = (0.35, 1.0)
    gray: tuple[int, int, int] = GRAY

    def __post_init__(self):
        prev_out = -1.0
        for lo, hi, hue in self.bands:
            if not 0 <= lo < hi:
                raise ParameterError("bands need 0 <= rho_in < rho_out")
            if lo < prev_out:
                raise ParameterError("bands must be sorted and non-overlapping")
            if not 0 <= hue < 360:
                raise ParameterError("hue must be in [0, 360)")
            prev_out = hi
        for a, b in (self.s_range, self.v_range):
            if not 0 <= a <= b <= 1:
                raise ParameterError("saturation/brightness ranges must sit in [0,1]")


def default_scheme(
    n_bands: int = 12, rho_min: float = 0.05, rho_max: float = 20.0
) -> AnnulusScheme:
    """n_bands geometric bands from rho_min to rho_max plus an unbounded
    final band; hues equally spaced starting at 0 degrees."""
    edges = np.geomspace(rho_min, rho_max, n_bands + 1)
    total = n_bands + 1
    bands = []
    for i in range(n_bands):
        bands.append((float(edges[i]), float(edges[i + 1]), 360.0 * i / total))
    bands.append((float(edges[-1]), math.inf, 360.0 * n_bands / total))
    return AnnulusScheme(tuple(bands))


@dataclass(frozen=True)
class MeshSpec:
    """Overlay mesh in the w-plane: circles centered at the origin and rays
    from the origin."""

    circles: int = 0
    rays: int = 0


@dataclass
class RasterScene:
    """View window, resolution and overlays for one image."""

    window: tuple[float, float, float, float]  # x0, x1, y0, y1
    width: int = 800
    height: int = 800
    mode: str = "preimage"  # or "target"
    supersample: bool = False
    mesh: MeshSpec | None = None
    curves: list = field(default_factory=list)
    overlay_color: tuple[int, int, int] = (20, 20, 20)
    overlay_thickness: float = 1.0

    def __post_init__(self):
        x0, x1, y0, y1 = self.window
        if not (x0 < x1 and y0 < y1):
            raise ParameterError("window must satisfy x0 < x1 and y0 < y1")
        if self.mode not in ("target", "preimage"):
            raise ParameterError("mode must be 'target' or 'preimage'")
        if self.width < 1 or self.height < 1:
            raise ParameterError("resolution must be positive")
        if self.width * self.height > PIXEL_GUARD:
            raise ResolutionGuardError(
                f"{self.width}x{self.height} exceeds the {PIXEL_GUARD} pixel guard"
            )


# ---------------------------------------------------------------------------
# coloring


def _color_arrays(wr: np.ndarray, wi: np.ndarray, scheme: AnnulusScheme):
    """Float RGB in [0,1] for finite values; NaN/inf and out-of-band pixels
    get the neutral gray."""
    mod = np.hypot(wr, wi)
    arg = np.arctan2(wi, wr)
    arg = np.where(arg < 0.0, arg + 2.0 * math.pi, arg)
    frac = arg / (2.0 * math.pi)
    s_min, s_max = scheme.s_range
    v_min, v_max = scheme.v_range
    g = np.float64(scheme.gray[0] / 255.0), np.float64(scheme.gray[1] / 255.0), np.float64(
        scheme.gray[2] / 255.0
    )
    R = np.full(wr.shape, g[0])
    G = np.full(wr.shape, g[1])
    Bc = np.full(wr.shape, g[2])
    finite = np.isfinite(mod)
    for lo, hi, hue in scheme.bands:
        mask = finite & (mod >= lo) & (mod < hi)
        if not mask.any():
            continue
        s = s_min + (s_max - s_min) * frac[mask]
        m = mod[mask]
        if lo == 0.0:
            v = v_min + (v_max - v_min) * (m / hi)
        elif math.isinf(hi):
            v = v_min + (v_max - v_min) * (1.0 - lo / m)
        else:
            scale = math.log(hi) - math.log(lo)
            v = v_min + (v_max - v_min) * ((np.log(m) - math.log(lo)) / scale)
        r, gg, b = _hsv_to_rgb(hue, s, v)
        R[mask] = r
        G[mask] = gg
        Bc[mask] = b
    return R, G, Bc


def _hsv_to_rgb(hue_deg: float, s: np.ndarray, v: np.ndarray):
    """Standard HSV sector conversion with a fixed hue."""
    c = v * s
    hp = hue_deg / 60.0
    x = c * (1.0 - abs(hp % 2.0 - 1.0))
    m = v - c
    sector = int(hp) % 6
    zero = np.zeros_like(c)
    table = [
        (c, x, zero),
        (x, c, zero),
        (zero, c, x),
        (zero, x, c),
        (x, zero, c),
        (c, zero, x),
    ]
    r, g, b = table[sector]
    return r + m, g + m, b + m


def _quantize(R, G, B):
    out = np.empty(R.shape + (3,), dtype=np.uint8)
    for i, ch in enumerate((R, G, B)):
        out[..., i] = np.clip(np.floor(ch * 255.0 + 0.5), 0.0, 255.0).astype(np.uint8)
    return out


def color_of(w: ExtComplex, scheme: AnnulusScheme) -> tuple[int, int, int]:
    """8-bit color of one w-plane point (round half up); INF and out-of-band
    values map to the scheme's gray."""
    if is_inf(w):
        return scheme.gray
    w = complex(w)
    wr = np.array([w.real])
    wi = np.array([w.imag])
    rgb = _quantize(*_color_arrays(wr, wi, scheme))
    return int(rgb[0, 0]), int(rgb[0, 1]), int(rgb[0, 2])


# ---------------------------------------------------------------------------
# rendering


def _pixel_axes(scene: RasterScene):
    x0, x1, y0, y1 = scene.window
    W, H = scene.width, scene.height
    xs = x0 + (x1 - x0) * (np.arange(W) + 0.5) / W
    ys = y0 + (y1 - y0) * (np.arange(H) + 0.5) / H  # bottom to top
    return xs, ys


def pixel_center(scene: RasterScene, row: int, col: int) -> complex:
    """Plane point under pixel (row, col) of the encoded image (row 0 at top)."""
    xs, ys = _pixel_axes(scene)
    return complex(xs[col], ys[scene.height - 1 - row])


def _values_rows(B, scene, xs, ys, rows):
    X = np.broadcast_to(xs, (len(rows), len(xs)))
    Y = ys[rows][:, None]
    Z = X + 1j * Y
    if scene.mode == "target":
        return Z.astype(np.complex128)
    return B.eval_grid(Z)


def _render_block(B, scene, scheme, xs, ys, rows):
    if scene.supersample:
        x0, x1, y0, y1 = scene.window
        dx = (x1 - x0) / scene.width / 4.0
        dy = (y1 - y0) / scene.height / 4.0
        acc = None
        for sx in (-dx, dx):
            for sy in (-dy, dy):
                vals = _values_rows(B, scene, xs + sx, ys + sy, rows)
                R, G, Bl = _color_arrays(vals.real, vals.imag, scheme)
                if acc is None:
                    acc = [R, G, Bl]
                else:
                    acc = [a + b for a, b in zip(acc, (R, G, Bl))]
        return _quantize(*(a / 4.0 for a in acc))
    vals = _values_rows(B, scene, xs, ys, rows)
    return _quantize(*_color_arrays(vals.real, vals.imag, scheme))


def render(
    B: BlaschkeProduct | None,
    scene: RasterScene,
    scheme: AnnulusScheme,
    threads: int = 1,
) -> np.ndarray:
    """Render to an (H, W, 3) uint8 array, row 0 at the top (y axis points
    up in the data, rows are flipped at assembly).  The pixel bytes are
    independent of the thread count."""
    if scene.mode == "preimage" and B is None:
        raise ParameterError("pre-image mode needs a product to pull back through")
    xs, ys = _pixel_axes(scene)
    H, W = scene.height, scene.width
    img = np.empty((H, W, 3), dtype=np.uint8)
    if threads == 0:
        threads = min(8, os.cpu_count() or 1)
    row_ids = np.arange(H)
    blocks = np.array_split(row_ids, max(1, min(threads * 4, H)))

    def work(rows):
        return rows, _render_block(B, scene, scheme, xs, ys, rows)

    if threads <= 1:
        results = [work(rows) for rows in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(work, blocks))
    for rows, block in results:
        img[H - 1 - rows] = block  # row flip: data y-up to image top-down
    _draw_overlays(B, scene, scheme, img)
    return img


# ---------------------------------------------------------------------------
# overlays


def _overlay_curves(B, scene, scheme):
    """Expand the mesh spec into drawable point lists (plus explicit curves)."""
    curves = []
    for c in scene.curves:
        pts = c.points if hasattr(c, "points") else list(c)
        curves.append(pts)
    if scene.mesh and (scene.mesh.circles or scene.mesh.rays):
        finite_edges = [b[0] for b in scheme.bands] + [
            b[1] for b in scheme.bands if math.isfinite(b[1])
        ]
        lo, hi = min(finite_edges), max(finite_edges)
        radii = np.geomspace(max(lo, 1e-3), hi, scene.mesh.circles) if scene.mesh.circles else []
        angles = [2 * math.pi * k / scene.mesh.rays for k in range(scene.mesh.rays)]
        if scene.mode == "target":
            th = np.linspace(0, 2 * math.pi, 361)
            for r in radii:
                curves.append([complex(r * math.cos(t), r * math.sin(t)) for t in th])
            span = np.geomspace(max(lo, 1e-3), hi, 64)
            for ang in angles:
                d = complex(math.cos(ang), math.sin(ang))
                curves.append([d * float(m) for m in span])
        else:
            from .domains import boundaries_by_continuation, ray_segment_path
            from .fibers import AnnulusSpec, annulus_preimage

            for r in radii:
                spec = AnnulusSpec(r * 0.999, r * 1.001, phi_samples=256, rho_samples=1)
                curves += [c.points for c in annulus_preimage(B, spec)]
            for ang in angles:
                path = ray_segment_path(ang, max(lo, 1e-3), hi, 96)
                try:
                    curves += [
                        c.points for c in boundaries_by_continuation(B, path, samples=120)
                    ]
                except Exception:
                    continue
    return curves


def _draw_overlays(B, scene, scheme, img):
    curves = _overlay_curves(B, scene, scheme)
    if not curves:
        return
    x0, x1, y0, y1 = scene.window
    H, W = scene.height, scene.width
    cov = np.zeros((H, W))
    halfw = max(0.5, scene.overlay_thickness / 2.0)
    margin = halfw + 1.5
    for pts in curves:
        px = []
        for z in pts:
            if is_inf(z):
                px.append(None)
                continue
            z = complex(z)
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                px.append(None)
                continue
            cx = (z.real - x0) / (x1 - x0) * W - 0.5
            cy = H - 1 - ((z.imag - y0) / (y1 - y0) * H - 0.5)
            px.append((cx, cy))
        for p, q in zip(px, px[1:]):
            if p is None or q is None:
                continue
            _accumulate_segment(cov, p, q, halfw, margin)
    mask = cov > 0
    if not mask.any():
        return
    col = np.array(scene.overlay_color, dtype=np.float64)
    base = img[mask].astype(np.float64)
    a = cov[mask][:, None]
    img[mask] = np.clip(np.floor(base * (1 - a) + col * a + 0.5), 0, 255).astype(np.uint8)


def _accumulate_segment(cov, p, q, halfw, margin):
    H, W = cov.shape
    (x1p, y1p), (x2p, y2p) = p, q
    if max(abs(x1p), abs(x2p)) > 10 * W or max(abs(y1p), abs(y2p)) > 10 * H:
        return
    lo_x = int(max(0, math.floor(min(x1p, x2p) - margin)))
    hi_x = int(min(W - 1, math.ceil(max(x1p, x2p) + margin)))
    lo_y = int(max(0, math.floor(min(y1p, y2p) - margin)))
    hi_y = int(min(H - 1, math.ceil(max(y1p, y2p) + margin)))
    if lo_x > hi_x or lo_y > hi_y:
        return
    ys, xs = np.mgrid[lo_y : hi_y + 1, lo_x : hi_x + 1]
    dx, dy = x2p - x1p, y2p - y1p
    L2 = dx * dx + dy * dy
    if L2 == 0:
        t = np.zeros_like(xs, dtype=float)
    else:
        t = np.clip(((xs - x1p) * dx + (ys - y1p) * dy) / L2, 0.0, 1.0)
    ex = x1p + t * dx - xs
    ey = y1p + t * dy - ys
    dist = np.hypot(ex, ey)
    a = np.clip(halfw + 0.5 - dist, 0.0, 1.0)
    np.maximum(cov[lo_y : hi_y + 1, lo_x : hi_x + 1], a, out=cov[lo_y : hi_y + 1, lo_x : hi_x + 1])


# ---------------------------------------------------------------------------
# encoders


def write_png(img: np.ndarray, path: str) -> None:
    """8-bit RGB PNG, written atomically (temp file + rename)."""
    from PIL import Image

    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(suffix=".png", dir=d)
    try:
        with os.fdopen(fd, "wb") as fh:
            Image.fromarray(img, mode="RGB").save(fh, format="PNG")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_ppm(img: np.ndarray, path: str) -> None:
    """Binary P6 PPM for dependency-free consumers; atomic like write_png."""
    h, w, _ = img.shape
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(suffix=".ppm", dir=d)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
            fh.write(img.tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
