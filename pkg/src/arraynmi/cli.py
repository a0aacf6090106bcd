"""Experiment runner: NMI and SINR sweeps with CSV output and a JSON manifest.

Subcommands
-----------
sweep-m   NMI vs antenna count, fixed spacing (--d) or space constraint (--D)
sweep-d   NMI and mean MMSE SINR vs constraint diagonal D at fixed M
two-ray   normalized two-ray interference vs angular offset
point     one kappa or SINR evaluation for a single configuration

Values in every CSV are written with full round-trip precision; re-running a
spec with the same seed reproduces the CSV byte for byte regardless of the
worker count (each sweep point draws from its own pre-assigned substream and
rows are emitted in canonical order).  A `<out>.manifest.json` records the
resolved parameters, seed, versions, and wall time.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .angular import AngularModel, measured_model, uniform_model
from .geometry import ArrayConfig, TopologyKind, spacing_under_constraint
from .nmi import SeriesConvergenceError, TruncationPolicy, nmi_closed_form
from .simulate import (PathLossParams, SinrConfig, calibrate_rho,
                       mean_mmse_sinr, nmi_monte_carlo)

TOPOLOGY_ORDER = [TopologyKind.ULA, TopologyKind.HURA, TopologyKind.VURA,
                  TopologyKind.UCirA, TopologyKind.UCylA]

DEFAULT_M_GRID = [4, 16, 36, 64, 100, 144]
DEFAULT_D_BASE = 7.77
DEFAULT_D_GRID = [0.25 * 7.77, 0.5 * 7.77, 7.77, 2 * 7.77, 4 * 7.77,
                  8 * 7.77, 12 * 7.77]

CSV_COLUMNS = {
    "sweep-m": ["topology", "M", "d_used", "kappa_closed", "kappa_mc", "stderr"],
    "sweep-d": ["topology", "D", "kappa_closed", "sinr_db_mean", "sinr_stderr"],
    "two-ray": ["topology", "dphi_deg", "dtheta_deg", "I_raw", "I_normalized"],
    "point-nmi": ["topology", "M", "d_used", "kappa_closed", "kappa_mc", "stderr"],
    "point-sinr": ["topology", "M", "d_used", "rho", "sinr_db_mean", "sinr_stderr"],
}


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(float(x))
    return str(x)


def _parse_topologies(text: str):
    names = {k.value.lower(): k for k in TopologyKind}
    out = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        if tok == "all":
            return list(TOPOLOGY_ORDER)
        if tok not in names:
            raise SystemExit(f"unknown topology {tok!r}; choose from "
                             + ",".join(k.value for k in TOPOLOGY_ORDER))
        out.append(names[tok])
    return out


def _load_config(path: str) -> dict:
    """Flat key = value lines; '#' starts a comment; keys match CLI flags."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"{path}:{lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("_", "-")] = val
    return out


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arraynmi",
                                description="Antenna-topology NMI experiments")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="mode", required=True)

    def common(sp, with_sinr=False):
        sp.add_argument("--topology", default="all",
                        help="comma list of ULA,HURA,VURA,UCirA,UCylA or 'all'")
        sp.add_argument("--m", default=None, help="antenna count(s), comma list")
        sp.add_argument("--d", default=None, type=str,
                        help="fixed antenna spacing in wavelengths")
        sp.add_argument("--D", default=None, type=str,
                        help="space-constraint diagonal(s) in wavelengths")
        sp.add_argument("--angles", choices=["measured", "uniform"], default="measured")
        sp.add_argument("--mc-samples", type=int, default=20000,
                        help="Monte Carlo NMI samples per point (0 disables)")
        sp.add_argument("--sinr-drops", type=int, default=200,
                        help="user drops per SINR point")
        sp.add_argument("--seed", type=int, default=1)
        sp.add_argument("--config", default=None, help="key=value config file")
        sp.add_argument("--out", default=None, help="CSV output path")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--series-tol", type=float, default=1e-10)
        # channel / cell parameters (paper-standard defaults)
        sp.add_argument("--users", type=int, default=4)
        sp.add_argument("--cell-radius", type=float, default=100.0)
        sp.add_argument("--exclusion-radius", type=float, default=10.0)
        sp.add_argument("--pathloss-exponent", type=float, default=3.8)
        sp.add_argument("--shadow-sigma-db", type=float, default=5.5)
        sp.add_argument("--ref-distance", type=float, default=1.0)
        sp.add_argument("--attenuation", type=float, default=1.0)
        sp.add_argument("--decay-ratio", type=float, default=0.1)
        sp.add_argument("--clusters", type=int, default=6)
        sp.add_argument("--subrays", type=int, default=10)
        sp.add_argument("--target-snr-db", type=float, default=-5.0)
        sp.add_argument("--sinr-average", choices=["linear", "db"], default="linear")

    sp = sub.add_parser("sweep-m", help="NMI vs antenna count")
    common(sp)

    sp = sub.add_parser("sweep-d", help="NMI and MMSE SINR vs constraint D")
    common(sp)

    sp = sub.add_parser("two-ray", help="two-ray interference vs offset")
    common(sp)
    sp.add_argument("--max-offset-deg", type=float, default=15.0)
    sp.add_argument("--offset-step-deg", type=float, default=0.25)

    sp = sub.add_parser("point", help="single kappa or SINR evaluation")
    common(sp)
    sp.add_argument("--quantity", choices=["nmi", "sinr"], default="nmi")
    return p


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser,
                  argv: list[str]):
    """Config file supplies defaults; explicit CLI flags win."""
    if not args.config:
        return args
    conf = _load_config(args.config)
    explicit = set()
    for tok in argv:
        if tok.startswith("--"):
            explicit.add(tok[2:].split("=", 1)[0])
    for key, val in conf.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise SystemExit(f"config key {key!r} is not a recognized option")
        if key in explicit:
            continue
        cur = getattr(args, attr)
        if isinstance(cur, bool):
            val = val.lower() in ("1", "true", "yes", "on")
        elif isinstance(cur, int):
            val = int(val)
        elif isinstance(cur, float):
            val = float(val)
        setattr(args, attr, val)
    return args


def _angle_model(name: str) -> AngularModel:
    return measured_model() if name == "measured" else uniform_model()


def _pathloss(args) -> PathLossParams:
    return PathLossParams(
        attenuation=args.attenuation, exponent=args.pathloss_exponent,
        shadow_sigma_db=args.shadow_sigma_db, ref_distance=args.ref_distance,
        cell_radius=args.cell_radius, exclusion_radius=args.exclusion_radius)


def _resolve_spacing(kind: TopologyKind, m: int, args):
    """The (d, D) pair actually used for one point; exactly one of --d/--D."""
    if args.d is not None and args.D is not None:
        raise SystemExit("set exactly one of --d and --D")
    if args.D is not None:
        diag = float(args.D)
        return spacing_under_constraint(kind, m, diag), diag
    d = float(args.d) if args.d is not None else 0.5
    return d, None


def _point_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def _run_points(points, fn, workers: int):
    """Evaluate fn over indexed points, preserving canonical order."""
    if workers <= 1:
        return [fn(i, pt) for i, pt in enumerate(points)]
    out = [None] * len(points)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        futs = {pool.submit(fn, i, pt): i for i, pt in enumerate(points)}
        for fut in concurrent.futures.as_completed(futs):
            out[futs[fut]] = fut.result()
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _m_values(args, constrained: bool):
    if args.m is not None:
        return [int(s) for s in str(args.m).split(",")]
    return list(DEFAULT_M_GRID)


def run_sweep_m(args) -> list[list]:
    topologies = _parse_topologies(args.topology)
    constrained = args.D is not None
    model = _angle_model(args.angles)
    trunc = TruncationPolicy(series_tol=args.series_tol)
    points = []
    for kind in topologies:
        for m in _m_values(args, constrained):
            points.append((kind, m))
    def one(i, pt):
        kind, m = pt
        try:
            if m == 1:
                d_used = 0.0
                cfg = ArrayConfig.uniform(kind, 1, 0.0)
                diag = None
            else:
                d_used, diag = _resolve_spacing(kind, m, args)
                cfg = ArrayConfig.uniform(kind, m, d_used)
        except ValueError as exc:
            print(f"warning: skipping {kind} M={m}: {exc}", file=sys.stderr)
            return None
        try:
            kappa = nmi_closed_form(cfg, model, trunc).kappa
        except SeriesConvergenceError as exc:
            print(f"warning: {kind} M={m}: {exc}", file=sys.stderr)
            kappa = float("nan")
        if args.mc_samples > 0:
            est, se = nmi_monte_carlo(cfg, model, args.mc_samples, _point_rng(args.seed, i))
            return [str(kind), m, d_used, kappa, est, se]
        return [str(kind), m, d_used, kappa, "", ""]
    rows = _run_points(points, one, args.workers)
    return [r for r in rows if r is not None]


def run_sweep_d(args) -> list[list]:
    topologies = _parse_topologies(args.topology)
    model = _angle_model(args.angles)
    trunc = TruncationPolicy(series_tol=args.series_tol)
    m = int(str(args.m).split(",")[0]) if args.m is not None else 100
    if args.D is not None:
        d_grid = [float(s) for s in str(args.D).split(",")]
    else:
        d_grid = list(DEFAULT_D_GRID)
    path = _pathloss(args)
    rho = calibrate_rho(path, args.target_snr_db)
    points = [(kind, diag) for kind in topologies for diag in d_grid]
    def one(i, pt):
        kind, diag = pt
        try:
            d = spacing_under_constraint(kind, m, diag)
            cfg = ArrayConfig.uniform(kind, m, d)
        except ValueError as exc:
            print(f"warning: skipping {kind} D={diag}: {exc}", file=sys.stderr)
            return None
        try:
            kappa = nmi_closed_form(cfg, model, trunc).kappa
        except SeriesConvergenceError as exc:
            print(f"warning: {kind} D={diag}: {exc}", file=sys.stderr)
            kappa = float("nan")
        sinr_db, se_db, _ = mean_mmse_sinr(
            cfg, model, path,
            SinrConfig(users=args.users, rho=rho,
                       target_median_rx_snr_db=args.target_snr_db),
            args.sinr_drops, _point_rng(args.seed, i),
            clusters=args.clusters, subrays=args.subrays,
            average=args.sinr_average)
        return [str(kind), diag, kappa, sinr_db, se_db]
    rows = _run_points(points, one, args.workers)
    return [r for r in rows if r is not None]


def run_two_ray(args) -> list[list]:
    topologies = _parse_topologies(args.topology)
    m = int(str(args.m).split(",")[0]) if args.m is not None else 100
    if args.d is None and args.D is None:
        args.D = str(DEFAULT_D_BASE)
    offsets = np.arange(0.0, args.max_offset_deg + 1e-9, args.offset_step_deg)
    base_phi, base_theta = 0.0, np.pi / 2.0
    rows = []
    from .geometry import two_ray_interference
    for kind in topologies:
        d_used, _ = _resolve_spacing(kind, m, args)
        cfg = ArrayConfig.uniform(kind, m, d_used)
        for dphi, dtheta in [(1, 0), (0, 1), (1, 1)]:
            for off in offsets:
                rad = np.deg2rad(off)
                raw, norm = two_ray_interference(
                    cfg, base_phi, base_theta,
                    base_phi + dphi * rad, base_theta + dtheta * rad)
                rows.append([str(kind), dphi * off, dtheta * off, raw, norm])
    return rows


def run_point(args) -> list[list]:
    topologies = _parse_topologies(args.topology)
    if len(topologies) != 1:
        raise SystemExit("point mode needs exactly one --topology")
    kind = topologies[0]
    m = int(str(args.m).split(",")[0]) if args.m is not None else 100
    model = _angle_model(args.angles)
    trunc = TruncationPolicy(series_tol=args.series_tol)
    if m == 1:
        d_used = 0.0
        cfg = ArrayConfig.uniform(kind, 1, 0.0)
    else:
        d_used, _ = _resolve_spacing(kind, m, args)
        cfg = ArrayConfig.uniform(kind, m, d_used)
    if args.quantity == "nmi":
        kappa = nmi_closed_form(cfg, model, trunc).kappa
        if args.mc_samples > 0:
            est, se = nmi_monte_carlo(cfg, model, args.mc_samples,
                                      _point_rng(args.seed, 0))
        else:
            est, se = "", ""
        row = [str(kind), m, d_used, kappa, est, se]
        cols = CSV_COLUMNS["point-nmi"]
    else:
        path = _pathloss(args)
        rho = calibrate_rho(path, args.target_snr_db)
        sinr_db, se_db, _ = mean_mmse_sinr(
            cfg, model, path,
            SinrConfig(users=args.users, rho=rho,
                       target_median_rx_snr_db=args.target_snr_db),
            args.sinr_drops, _point_rng(args.seed, 0),
            clusters=args.clusters, subrays=args.subrays,
            average=args.sinr_average)
        row = [str(kind), m, d_used, rho, sinr_db, se_db]
        cols = CSV_COLUMNS["point-sinr"]
    for name, val in zip(cols, row):
        print(f"{name} = {_fmt(val)}")
    return [row]


# ---------------------------------------------------------------------------

def _write_csv(path: str, columns: list[str], rows: list[list]):
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_manifest(path: str, args: argparse.Namespace, wall: float, n_rows: int):
    params = {k: v for k, v in sorted(vars(args).items()) if k != "config"}
    manifest = {
        "tool": "arraynmi",
        "version": __version__,
        "mode": args.mode,
        "parameters": params,
        "seed": args.seed,
        "truncation": {"series_tol": args.series_tol},
        "rows": n_rows,
        "wall_time_s": wall,
        "environment": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
        },
    }
    Path(path).write_text(json.dumps(manifest, indent=2, default=str) + "\n")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    args = _apply_config(args, parser, argv)
    t0 = time.monotonic()
    if args.mode == "sweep-m":
        rows, cols = run_sweep_m(args), CSV_COLUMNS["sweep-m"]
    elif args.mode == "sweep-d":
        rows, cols = run_sweep_d(args), CSV_COLUMNS["sweep-d"]
    elif args.mode == "two-ray":
        rows, cols = run_two_ray(args), CSV_COLUMNS["two-ray"]
    else:
        rows = run_point(args)
        cols = CSV_COLUMNS["point-nmi" if args.quantity == "nmi" else "point-sinr"]
    wall = time.monotonic() - t0
    if args.out:
        _write_csv(args.out, cols, rows)
        _write_manifest(args.out + ".manifest.json", args, wall, len(rows))
        print(f"wrote {len(rows)} rows to {args.out}")
    elif args.mode != "point":
        print(",".join(cols))
        for row in rows:
            print(",".join(_fmt(v) for v in row))
    return 0


if __name__ == "__main__":
    sys.exit(main())
