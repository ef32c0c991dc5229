"""Command-line driver: render, curves, animate, verify.

Configuration is flat JSON with dotted keys (see KNOWN_KEYS); every key can
also be set by a flag.  All outputs are written atomically and all random
sampling is seeded, so identical configurations give identical bytes.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import domains, fibers, raster, verify
from .critical import critical_two_zeros
from .errors import ConfigError, ParameterError, ResolutionGuardError
from .products import (
    PartialInfinite,
    Rotational,
    SinglePower,
    TwoRings,
    TwoZeros,
    build,
)
from .sphere import is_inf

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_CONFIG = 2
EXIT_RENDER = 3


def parse_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", "").replace("i", "j"))
        except ValueError as e:
            raise ConfigError(f"bad complex value {v!r}") from e
    raise ConfigError(f"bad complex value {v!r}")


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


KNOWN_KEYS = {
    "family.kind": str,
    "family.a": parse_complex,
    "family.a1": parse_complex,
    "family.a2": parse_complex,
    "family.n": int,
    "family.m": int,
    "family.r": float,
    "family.alpha": float,
    "family.r1": float,
    "family.r2": float,
    "family.alpha1": float,
    "family.alpha2": float,
    "scene.mode": str,
    "scene.window": list,
    "scene.width": int,
    "scene.height": int,
    "scene.supersample": bool,
    "scheme.bands": int,
    "scheme.rho_min": float,
    "scheme.rho_max": float,
    "scheme.s_min": float,
    "scheme.s_max": float,
    "scheme.v_min": float,
    "scheme.v_max": float,
    "overlay.mesh_circles": int,
    "overlay.mesh_rays": int,
    "overlay.boundaries": bool,
    "overlay.color": list,
    "overlay.thickness": float,
    "curves.samples": int,
    "curves.t_max": float,
    "curves.annuli": int,
    "animate.frames": int,
    "animate.param": str,
    "animate.to": parse_complex,
    "verify.filter": str,
    "verify.perturb": float,
    "out": str,
    "seed": str,
    "threads": int,
}


def parse_config_text(text: str) -> dict:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object with dotted keys")
    out = {}
    for key, value in raw.items():
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        caster = KNOWN_KEYS[key]
        try:
            out[key] = caster(value) if caster is not list else list(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad value for {key}: {value!r}") from e
    return out


def serialize_config(cfg: dict) -> str:
    """Canonical flat-JSON form; parse . serialize is idempotent."""
    enc = {}
    for key in sorted(cfg):
        v = cfg[key]
        if isinstance(v, complex):
            v = _fmt_complex(v)
        enc[key] = v
    return json.dumps(enc, indent=2, sort_keys=True) + "\n"


def family_from_config(cfg: dict):
    kind = cfg.get("family.kind")
    if kind is None:
        raise ConfigError("family.kind is required")
    try:
        if kind == "single_power":
            return SinglePower(cfg["family.a"], cfg.get("family.n", 1))
        if kind == "two_zeros":
            return TwoZeros(cfg["family.a1"], cfg["family.a2"], cfg.get("family.n", 1))
        if kind == "rotational":
            return Rotational(cfg["family.r"], cfg.get("family.alpha", 0.0), cfg.get("family.n", 1))
        if kind == "two_rings":
            alpha1 = cfg.get("family.alpha1", cfg.get("family.alpha", 0.0))
            alpha2 = cfg.get("family.alpha2", alpha1)
            return TwoRings(cfg["family.r1"], alpha1, cfg["family.r2"], alpha2, cfg.get("family.n", 1))
        if kind == "partial_infinite":
            return PartialInfinite(cfg.get("family.m", 9))
    except KeyError as e:
        raise ConfigError(f"family.kind={kind} needs key {e.args[0]!r}") from e
    raise ConfigError(f"unknown family.kind {kind!r}")


def scheme_from_config(cfg: dict) -> raster.AnnulusScheme:
    base = raster.default_scheme(
        n_bands=cfg.get("scheme.bands", 12),
        rho_min=cfg.get("scheme.rho_min", 0.05),
        rho_max=cfg.get("scheme.rho_max", 20.0),
    )
    s = (cfg.get("scheme.s_min", base.s_range[0]), cfg.get("scheme.s_max", base.s_range[1]))
    v = (cfg.get("scheme.v_min", base.v_range[0]), cfg.get("scheme.v_max", base.v_range[1]))
    return raster.AnnulusScheme(base.bands, s_range=s, v_range=v)


def scene_from_config(cfg: dict, mode: str) -> raster.RasterScene:
    default_window = (-3.0, 3.0, -3.0, 3.0) if mode == "preimage" else (-21.0, 21.0, -21.0, 21.0)
    window = tuple(cfg.get("scene.window", default_window))
    if len(window) != 4:
        raise ConfigError("scene.window must be [x0, x1, y0, y1]")
    mesh = None
    if cfg.get("overlay.mesh_circles", 0) or cfg.get("overlay.mesh_rays", 0):
        mesh = raster.MeshSpec(
            circles=cfg.get("overlay.mesh_circles", 0), rays=cfg.get("overlay.mesh_rays", 0)
        )
    color = tuple(cfg.get("overlay.color", (20, 20, 20)))
    return raster.RasterScene(
        window=window,
        width=cfg.get("scene.width", 800),
        height=cfg.get("scene.height", 800),
        mode=mode,
        supersample=cfg.get("scene.supersample", False),
        mesh=mesh,
        overlay_color=color,
        overlay_thickness=cfg.get("overlay.thickness", 1.0),
    )


def boundary_curves_for(spec, samples: int, t_max: float):
    """Fundamental-domain boundaries per family; continuation families use
    their documented default paths."""
    if isinstance(spec, SinglePower):
        return domains.boundaries_single_power(spec.a, spec.n, samples, t_max)
    if isinstance(spec, TwoZeros):
        return domains.boundaries_two_zeros(spec.a1, spec.a2, spec.n, samples, t_max)
    if isinstance(spec, Rotational):
        return domains.boundaries_rotational(spec.r, spec.alpha, spec.n, samples, t_max)
    if isinstance(spec, TwoRings) and spec.aligned:
        return domains.boundaries_two_rings_aligned(spec.r1, spec.r2, spec.alpha1, spec.n, samples, t_max)
    B = build(spec)
    if isinstance(spec, TwoRings):
        path = domains.general_two_rings_path(B, samples=max(60, samples // 2))
        return domains.boundaries_by_continuation(B, path)
    radius = min(1e-2, domains.default_detour_radius(B) * 10)
    path = domains.real_axis_detour_path(30.0, radius, samples=max(120, samples))
    return domains.boundaries_by_continuation(B, path)


def _atomic_write_text(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_image(img, path: str) -> None:
    if path.endswith(".ppm"):
        raster.write_ppm(img, path)
    else:
        raster.write_png(img, path)


# ---------------------------------------------------------------------------
# subcommands


def cmd_render(cfg: dict) -> int:
    spec = family_from_config(cfg)
    scheme = scheme_from_config(cfg)
    mode = cfg.get("scene.mode", "both")
    out = cfg.get("out", "blaschke_render.png")
    threads = cfg.get("threads", 1)
    B = build(spec)
    jobs = []
    if mode in ("preimage", "both"):
        jobs.append(("preimage", B))
    if mode in ("target", "both"):
        jobs.append(("target", None))
    if not jobs:
        raise ConfigError(f"scene.mode must be preimage, target or both, not {mode!r}")
    t0 = time.perf_counter()
    for m, prod in jobs:
        scene = scene_from_config(cfg, m)
        if cfg.get("overlay.boundaries", False) and m == "preimage":
            scene.curves = list(boundary_curves_for(spec, 300, 1e3))
        img = raster.render(prod, scene, scheme, threads=threads)
        path = out
        if mode == "both":
            stem, ext = os.path.splitext(out)
            path = f"{stem}_{m}{ext or '.png'}"
        _write_image(img, path)
        print(f"wrote {path} ({scene.width}x{scene.height}, {m})")
    print(f"render time: {time.perf_counter() - t0:.2f} s")
    return EXIT_OK


def _csv_float(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return f"{x:.17g}"


def cmd_curves(cfg: dict) -> int:
    spec = family_from_config(cfg)
    samples = cfg.get("curves.samples", 400)
    t_max = cfg.get("curves.t_max", 1e4)
    out = cfg.get("out", "curves.csv")
    curves = list(boundary_curves_for(spec, samples, t_max))
    n_annuli = cfg.get("curves.annuli", 0)
    if n_annuli:
        B = build(spec)
        scheme = scheme_from_config(cfg)
        finite = [b for b in scheme.bands if math.isfinite(b[1])]
        lo, hi = finite[0][0], finite[-1][1]
        for rho in np.geomspace(max(lo, 1e-3), hi, n_annuli):
            curves += fibers.annulus_preimage(
                B, fibers.AnnulusSpec(rho, rho * 1.0001, phi_samples=256, rho_samples=1)
            )
    lines = ["family,curve_id,branch,t,re,im,endpoint_label"]
    for cid, c in enumerate(curves):
        last = len(c.samples) - 1
        for i, (t, z) in enumerate(c.samples):
            label = c.start_label if i == 0 else (c.end_label if i == last else "")
            if is_inf(z):
                re = im = "inf"
            else:
                z = complex(z)
                re, im = _csv_float(z.real), _csv_float(z.imag)
            lines.append(
                f"{c.family},{cid},{c.branch},{_csv_float(float(t))},{re},{im},{label}"
            )
    _atomic_write_text(out, "\n".join(lines) + "\n")
    print(f"wrote {out} ({len(curves)} curves)")
    return EXIT_OK


def cmd_animate(cfg: dict) -> int:
    spec = family_from_config(cfg)
    frames = cfg.get("animate.frames", 2)
    if frames < 2:
        raise ConfigError("animate.frames must be >= 2")
    target = cfg.get("animate.to")
    if target is None:
        raise ConfigError("animate.to is required")
    param = cfg.get("animate.param", "a2" if isinstance(spec, TwoZeros) else "a")
    out = cfg.get("out", "frames")
    os.makedirs(out, exist_ok=True)
    scheme = scheme_from_config(cfg)
    threads = cfg.get("threads", 1)
    if param == "a" and isinstance(spec, SinglePower):
        start = complex(spec.a)
        make = lambda v: SinglePower(v, spec.n)
    elif param == "a2" and isinstance(spec, TwoZeros):
        start = complex(spec.a2)
        make = lambda v: TwoZeros(spec.a1, v, spec.n)
    else:
        raise ConfigError(f"animate.param {param!r} does not fit family {type(spec).__name__}")
    manifest = []
    for i in range(frames):
        s = i / (frames - 1)
        v = start + (complex(target) - start) * s
        if abs(v) >= 1:
            raise ConfigError(f"frame {i}: parameter {v} leaves the open disk")
        frame_spec = make(v)
        scene = scene_from_config(cfg, cfg.get("scene.mode", "preimage"))
        if scene.mode not in ("preimage", "target"):
            raise ConfigError("animate needs scene.mode preimage or target")
        img = raster.render(build(frame_spec), scene, scheme, threads=threads)
        name = f"frame_{i:04d}.png"
        _write_image(img, os.path.join(out, name))
        manifest.append(f"{name} {_fmt_complex(v)}")
    _atomic_write_text(os.path.join(out, "manifest.txt"), "\n".join(manifest) + "\n")
    print(f"wrote {frames} frames to {out}/")
    return EXIT_OK


def cmd_verify(cfg: dict) -> int:
    seed = int(cfg.get("seed", "0x5eed"), 16) if isinstance(cfg.get("seed"), str) else cfg.get("seed", verify.DEFAULT_SEED)
    results = verify.run_checks(
        name_filter=cfg.get("verify.filter"),
        seed=seed,
        perturb=cfg.get("verify.perturb", 0.0),
    )
    for res in results:
        print(res.line())
    n_fail = sum(1 for r in results if not r.passed)
    print(f"{len(results) - n_fail}/{len(results)} checks passed")
    return EXIT_OK if n_fail == 0 else EXIT_VERIFY_FAIL


# ---------------------------------------------------------------------------
# argument plumbing


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat JSON config file (dotted keys)")
    p.add_argument("--out", help="output path")
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--window", help="x0,x1,y0,y1")
    p.add_argument("--bands", type=int, help="number of bounded annulus bands")
    p.add_argument("--seed", help="hex seed for randomized sampling (default 0x5eed)")
    p.add_argument("--threads", type=int, help="worker threads (0 = auto); never changes bytes")
    p.add_argument("--supersample", action="store_true", help="2x2 supersampling")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="blaschke",
        description="Blaschke-product geometry: domain-colored renders, boundary "
        "curves, animations, and the numeric verification suite.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("render", help="render pre-image/target images")
    _add_common(pr)
    pr.add_argument("--mode", choices=["preimage", "target", "both"])
    pr.add_argument("--boundaries", action="store_true", help="overlay fundamental-domain boundaries")
    pr.add_argument("--mesh", help="CIRCLES,RAYS overlay mesh counts")

    pc = sub.add_parser("curves", help="export boundary curves as CSV")
    _add_common(pc)
    pc.add_argument("--samples", type=int)
    pc.add_argument("--t-max", dest="t_max", type=float)
    pc.add_argument("--annuli", type=int, help="also export pre-images of this many circles")

    pa = sub.add_parser("animate", help="render a parameter sweep as numbered frames")
    _add_common(pa)
    pa.add_argument("--frames", type=int)
    pa.add_argument("--param", choices=["a", "a2"])
    pa.add_argument("--to", help="sweep end value (complex)")
    pa.add_argument("--mode", choices=["preimage", "target"])

    pv = sub.add_parser("verify", help="run the numeric verification suite")
    _add_common(pv)
    pv.add_argument("--family", help="substring filter on check names")
    pv.add_argument("--perturb", type=float, help="parameter offset for negative control")
    return ap


def _flags_to_config(args: argparse.Namespace) -> dict:
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg.update(parse_config_text(fh.read()))
    flag_map = {
        "out": "out",
        "width": "scene.width",
        "height": "scene.height",
        "bands": "scheme.bands",
        "threads": "threads",
        "samples": "curves.samples",
        "t_max": "curves.t_max",
        "annuli": "curves.annuli",
        "frames": "animate.frames",
        "param": "animate.param",
        "mode": "scene.mode",
        "family": "verify.filter",
        "perturb": "verify.perturb",
        "seed": "seed",
    }
    for attr, key in flag_map.items():
        v = getattr(args, attr, None)
        if v is not None:
            cfg[key] = v
    if getattr(args, "window", None):
        try:
            cfg["scene.window"] = [float(x) for x in args.window.split(",")]
        except ValueError as e:
            raise ConfigError(f"bad --window {args.window!r}") from e
    if getattr(args, "supersample", False):
        cfg["scene.supersample"] = True
    if getattr(args, "boundaries", False):
        cfg["overlay.boundaries"] = True
    if getattr(args, "mesh", None):
        try:
            c, r = (int(x) for x in args.mesh.split(","))
        except ValueError as e:
            raise ConfigError(f"bad --mesh {args.mesh!r}") from e
        cfg["overlay.mesh_circles"] = c
        cfg["overlay.mesh_rays"] = r
    if getattr(args, "to", None):
        cfg["animate.to"] = parse_complex(args.to)
    return cfg


COMMANDS = {
    "render": cmd_render,
    "curves": cmd_curves,
    "animate": cmd_animate,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = _flags_to_config(args)
    except (ConfigError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](cfg)
    except (ConfigError, ParameterError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResolutionGuardError, OSError, RuntimeError) as e:
        print(f"{args.command} error: {e}", file=sys.stderr)
        return EXIT_RENDER


if __name__ == "__main__":
    sys.exit(main())
