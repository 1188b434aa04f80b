"""Command-line driver.

Subcommands: phantom (rasterize), forward (cone or radon sinogram),
reconstruct (thm2 / thm6 / compton / fbp), verify (identity checks), lambda
(zonal-kernel eigenvalue table). Each takes flags plus an optional plain-text
config file of ``key = value`` lines; flags override the file, and the
effective settings are echoed to ``run.cfg`` in the output directory. Exit
codes: 0 success, 1 a checked tolerance failed, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from .circle_ops import funk_hecke_lambda
from .cone import cone_forward_sinogram, identity_suite
from .formats import (
    write_cone_sinogram,
    write_image_raw,
    write_pgm16,
    write_radon_sinogram,
)
from .geometry import RadonSinogram, sphere_area
from .inversion import (
    CameraConfig,
    MuWeight,
    compton_reconstruct,
    detector_positions,
    invert_mu_weighted,
    invert_sine_weighted,
)
from .phantoms import load_phantom_file, radon_analytic, rasterize
from .radon import fbp_radon_inversion

_INT_KEYS = frozenset({"npx", "nbeta", "npsi", "perside", "ntheta", "ns", "seed", "count", "mmax", "n"})
_FLOAT_KEYS = frozenset({"extent", "smax", "threshold"})

_DEFAULTS = {
    "phantom": {"phantom": None, "out": "out", "npx": 256, "extent": 1.0},
    "forward": {
        "phantom": None,
        "out": "out",
        "method": "cone",
        "extent": 1.0,
        "nbeta": 200,
        "npsi": 200,
        "perside": 257,
        "ntheta": 200,
        "ns": 257,
        "smax": None,
        "vertex": None,
    },
    "reconstruct": {
        "phantom": None,
        "out": "out",
        "method": "compton",
        "extent": 1.0,
        "npx": None,
        "nbeta": None,
        "npsi": None,
        "perside": 257,
        "ntheta": None,
        "ns": None,
        "smax": None,
        "threshold": None,
    },
    "verify": {"out": "out", "seed": 0, "count": 10, "identity": None, "n": None},
    "lambda": {"out": "out", "n": 2, "mmax": 8},
}

_METHOD_ALIASES = {"mu-weighted": "thm2", "sine-weighted": "thm6"}


def _convert(key: str, raw: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError as exc:
        raise ValueError(f"config key {key!r}: {exc}") from None
    return raw


def _read_config_file(path) -> dict:
    table = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (part.strip() for part in line.split("=", 1))
            table[key.replace("-", "_")] = val
    return table


def _merge_config(args: argparse.Namespace, command: str) -> dict:
    cfg = dict(_DEFAULTS[command])
    if args.config:
        for key, raw in _read_config_file(args.config).items():
            if key not in cfg:
                raise ValueError(f"unknown config key {key!r} for command {command!r}")
            cfg[key] = _convert(key, raw)
    for key in cfg:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    return cfg


def _prepare_out(cfg: dict) -> str:
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    lines = [f"{key} = {cfg[key]}\n" for key in sorted(cfg) if cfg[key] is not None]
    with open(os.path.join(out, "run.cfg"), "w", encoding="utf-8") as fh:
        fh.writelines(lines)
    return out


def _require_phantom(cfg: dict):
    if not cfg["phantom"]:
        raise ValueError("a phantom file is required (--phantom FILE)")
    return load_phantom_file(cfg["phantom"])


def _write_raster_products(out: str, stem: str, grid):
    write_image_raw(os.path.join(out, stem + ".raw"), grid)
    vmin, vmax = write_pgm16(os.path.join(out, stem + ".pgm"), grid.values)
    with open(os.path.join(out, stem + "_scale.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["field", "value"])
        writer.writerow(["n_px", grid.n_px])
        writer.writerow(["half_extent", repr(grid.half_extent)])
        writer.writerow(["vmin", repr(vmin)])
        writer.writerow(["vmax", repr(vmax)])


def _parse_vertex(raw: str) -> tuple[float, float]:
    parts = raw.split(",")
    if len(parts) != 2:
        raise ValueError(f"vertex must be 'X,Y', got {raw!r}")
    return float(parts[0]), float(parts[1])


def cmd_phantom(cfg: dict) -> int:
    phantom = _require_phantom(cfg)
    out = _prepare_out(cfg)
    grid = rasterize(phantom, cfg["npx"], cfg["extent"])
    _write_raster_products(out, "phantom", grid)
    return 0


def cmd_forward(cfg: dict) -> int:
    phantom = _require_phantom(cfg)
    method = cfg["method"]
    if method not in ("cone", "radon"):
        raise ValueError(f"forward method must be cone or radon, got {method!r}")
    out = _prepare_out(cfg)
    if method == "radon":
        n_theta, n_s = cfg["ntheta"], cfg["ns"]
        if n_theta < 1 or n_s < 2:
            raise ValueError("radon lattice needs ntheta >= 1 and ns >= 2")
        s_max = cfg["smax"] or cfg["extent"] * math.sqrt(2.0)
        thetas = np.arange(n_theta) * (math.pi / n_theta)
        offsets = np.linspace(-s_max, s_max, n_s)
        values = radon_analytic(phantom, thetas[:, None], offsets[None, :])
        sino = RadonSinogram(n_theta=n_theta, n_s=n_s, s_max=s_max, values=values)
        write_radon_sinogram(os.path.join(out, "radon.sg"), sino)
    else:
        if cfg["vertex"] is not None:
            vertices = np.array([_parse_vertex(cfg["vertex"])])
        else:
            cam = CameraConfig(cfg["extent"], cfg["perside"], cfg["nbeta"], cfg["npsi"])
            vertices = detector_positions(cam)
        sino = cone_forward_sinogram(phantom, vertices, cfg["nbeta"], cfg["npsi"])
        write_cone_sinogram(os.path.join(out, "cone.sg"), sino)
    return 0


def _reconstruct_grid(cfg: dict, phantom, method: str):
    extent = cfg["extent"]
    if method in ("thm2", "thm6"):
        n_px = cfg["npx"] or 128
        n_beta = cfg["nbeta"] or 64
        n_psi = cfg["npsi"] or 256
        if method == "thm2":
            return invert_mu_weighted(phantom, n_px, extent, MuWeight.uniform(n_beta), n_psi)
        return invert_sine_weighted(phantom, n_px, extent, n_beta, n_psi)
    if method == "compton":
        cam = CameraConfig(extent, cfg["perside"], cfg["nbeta"] or 200, cfg["npsi"] or 200)
        return compton_reconstruct(
            phantom, cam, cfg["npx"] or 256, extent, cfg["ntheta"], cfg["ns"], cfg["smax"]
        )
    n_theta = cfg["ntheta"] or 200
    n_s = cfg["ns"] or 257
    s_max = cfg["smax"] or extent * math.sqrt(2.0)
    thetas = np.arange(n_theta) * (math.pi / n_theta)
    offsets = np.linspace(-s_max, s_max, n_s)
    values = radon_analytic(phantom, thetas[:, None], offsets[None, :])
    sino = RadonSinogram(n_theta=n_theta, n_s=n_s, s_max=s_max, values=values)
    return fbp_radon_inversion(sino, cfg["npx"] or 256, extent)


def cmd_reconstruct(cfg: dict) -> int:
    method = _METHOD_ALIASES.get(cfg["method"], cfg["method"])
    if method not in ("thm2", "thm6", "compton", "fbp"):
        raise ValueError(f"unknown reconstruction method {cfg['method']!r}")
    phantom = _require_phantom(cfg)
    out = _prepare_out(cfg)
    grid = _reconstruct_grid(cfg, phantom, method)
    _write_raster_products(out, "recon", grid)
    truth = rasterize(phantom, grid.n_px, grid.half_extent)
    denom = float(np.linalg.norm(truth.values))
    diff = float(np.linalg.norm(grid.values - truth.values))
    rel_l2 = diff / denom if denom > 0.0 else (0.0 if diff == 0.0 else math.inf)
    with open(os.path.join(out, "report.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "n_px", "rel_l2"])
        writer.writerow([method, grid.n_px, repr(rel_l2)])
    print(f"{method}: rel L2 error {rel_l2:.4g}")
    if cfg["threshold"] is not None and not rel_l2 <= cfg["threshold"]:
        print(f"rel L2 {rel_l2:.4g} exceeds threshold {cfg['threshold']:.4g}", file=sys.stderr)
        return 1
    return 0


def cmd_verify(cfg: dict) -> int:
    which = cfg["identity"]
    if cfg["n"] is not None:
        if which != "asgeirsson" or cfg["n"] not in (2, 3):
            raise ValueError("--n picks the asgeirsson dimension; use --identity asgeirsson --n {2,3}")
        which = f"asgeirsson-{cfg['n']}d"
    out = _prepare_out(cfg)
    rows = identity_suite(seed=cfg["seed"], count=cfg["count"], which=which)
    failures = 0
    with open(os.path.join(out, "verify.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["identity", "case", "lhs", "rhs", "rel_err", "status"])
        for row in rows:
            ok = row.rel_err <= 1e-3
            failures += not ok
            writer.writerow(
                [row.identity, row.case, repr(row.lhs), repr(row.rhs), repr(row.rel_err), "pass" if ok else "fail"]
            )
    print(f"{len(rows) - failures}/{len(rows)} identity checks passed")
    return 1 if failures else 0


def cmd_lambda(cfg: dict) -> int:
    if cfg["n"] not in (2, 3):
        raise ValueError("eigenvalue table supports n in {2, 3}")
    if cfg["mmax"] < 0:
        raise ValueError("mmax must be nonnegative")
    out = _prepare_out(cfg)
    area = sphere_area(cfg["n"])
    with open(os.path.join(out, "lambda.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "m", "lambda", "normalized"])
        for m in range(cfg["mmax"] + 1):
            lam = funk_hecke_lambda(m, cfg["n"])
            writer.writerow([cfg["n"], m, repr(lam), repr(lam / area)])
            print(f"n={cfg['n']} m={m}: lambda={lam:.12g} normalized={lam / area:.12g}")
    return 0


_HANDLERS = {
    "phantom": cmd_phantom,
    "forward": cmd_forward,
    "reconstruct": cmd_reconstruct,
    "verify": cmd_verify,
    "lambda": cmd_lambda,
}


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--out", help="output directory (default: out)")
    sub.add_argument("--config", help="plain-text key = value config file; flags override it")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conetomo", description=__doc__.split("\n\n")[1])
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("phantom", help="rasterize a phantom file to raw + PGM")
    _add_common(p)
    p.add_argument("--phantom", help="phantom description file")
    p.add_argument("--npx", type=int, help="raster side in pixels")
    p.add_argument("--extent", type=float, help="raster half extent")

    p = subs.add_parser("forward", help="write a cone or radon sinogram")
    _add_common(p)
    p.add_argument("--phantom", help="phantom description file")
    p.add_argument("--method", help="cone or radon")
    p.add_argument("--extent", type=float, help="camera half extent")
    p.add_argument("--nbeta", type=int, help="cone axis-angle count")
    p.add_argument("--npsi", type=int, help="cone opening-angle count")
    p.add_argument("--perside", type=int, help="detectors per camera side")
    p.add_argument("--vertex", help="single cone vertex 'X,Y' instead of the camera boundary")
    p.add_argument("--ntheta", type=int, help="radon angle count")
    p.add_argument("--ns", type=int, help="radon offset count")
    p.add_argument("--smax", type=float, help="radon offset half range")

    p = subs.add_parser("reconstruct", help="reconstruct and report rel. L2 error")
    _add_common(p)
    p.add_argument("--phantom", help="phantom description file")
    p.add_argument("--method", help="thm2|thm6|compton|fbp (aliases mu-weighted, sine-weighted)")
    p.add_argument("--npx", type=int, help="raster side in pixels")
    p.add_argument("--extent", type=float, help="raster / camera half extent")
    p.add_argument("--nbeta", type=int, help="cone axis-angle count")
    p.add_argument("--npsi", type=int, help="cone opening-angle count")
    p.add_argument("--perside", type=int, help="detectors per camera side")
    p.add_argument("--ntheta", type=int, help="radon angle count")
    p.add_argument("--ns", type=int, help="radon offset count")
    p.add_argument("--smax", type=float, help="radon offset half range")
    p.add_argument("--threshold", type=float, help="fail (exit 1) if rel. L2 exceeds this")

    p = subs.add_parser("verify", help="run integral-identity checks")
    _add_common(p)
    p.add_argument("--seed", type=int, help="random phantom seed")
    p.add_argument("--count", type=int, help="random phantoms per identity")
    p.add_argument("--identity", help="restrict to one identity family")
    p.add_argument("--n", type=int, help="dimension for --identity asgeirsson")

    p = subs.add_parser("lambda", help="tabulate zonal-kernel eigenvalues")
    _add_common(p)
    p.add_argument("--n", type=int, help="sphere dimension parameter (2 or 3)")
    p.add_argument("--mmax", type=int, help="largest harmonic degree")

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _merge_config(args, args.command)
        return _HANDLERS[args.command](cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
