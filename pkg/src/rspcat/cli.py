"""Command-line front end.

Subcommands
-----------
prepare       Bob's state for one configuration: W(0,0), negativity, cat fit.
sweep         The same figures of merit along one parameter axis (CSV).
optimum       Squeezing scan for n-photon subtraction in either scheme.
tomography    Sample homodyne data and reconstruct by maximum likelihood.
wigner-grid   Write Bob's Wigner function on a grid (CSV or packed binary).

Exit status: 0 on success, 2 for invalid input, 1 for numerical failures.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import analysis, tomography
from .config import ExperimentConfig, coerce_value, load_config, parse_config
from .errors import CutoffTooSmall, NumericError, RspcatError, ValidationError
from .fockcore import DensityMatrix, cat, db_to_r, fock, variance_to_db
from .gaussianmodel import effective_params, lossy_cm, tmss_cm
from .protocol import (
    ProjectionSpec,
    bob_mixed_conditional,
    bob_pure_conditional,
    bob_windowed,
    pure_tail_cutoff,
    success_probability,
)

SWEEP_AXES = ("eta_A", "eta_B", "squeezing_db", "window_dx", "n_subtract")
SWEEP_COLUMNS = ("axis_value", "W00", "neg_volume", "fidelity", "alpha_star", "success_prob")


def _fmt(v) -> str:
    return f"{v:.17g}"


# ---------------------------------------------------------------------------
# pipeline


def _auto_cutoff(build, cutoff):
    """Call ``build(cutoff)``; with ``cutoff=None`` grow it until the tail check passes."""
    if cutoff is not None:
        return build(cutoff)
    cut = 20
    while True:
        try:
            return build(cut)
        except CutoffTooSmall:
            if cut > 600:
                raise
            cut = int(cut * 1.5)


def bob_state(cfg: ExperimentConfig):
    """Bob's normalized conditional state and the window success probability (or None)."""
    v_s, v_a = cfg.source_variances()
    spec = ProjectionSpec(theta=cfg.theta_rad, window=cfg.window_dx)
    if cfg.n_subtract == 1:
        p = effective_params(lossy_cm(tmss_cm(v_s, v_a), cfg.eta_A, cfg.eta_B))
        if cfg.window_dx > 0:
            rho = _auto_cutoff(lambda c: bob_windowed(p, spec, c), cfg.cutoff)
            return rho, success_probability(p, spec)
        return _auto_cutoff(lambda c: bob_mixed_conditional(p, spec, c), cfg.cutoff), None
    if not (cfg.is_pure_source() and cfg.eta_A == 1.0 and cfg.eta_B == 1.0):
        raise ValidationError("n_subtract >= 2 is modelled for a pure source without loss only")
    if cfg.window_dx > 0:
        raise ValidationError("n_subtract >= 2 needs an exact projection (window_dx = 0)")
    r = db_to_r(variance_to_db(v_s))
    cutoff = cfg.cutoff if cfg.cutoff is not None else pure_tail_cutoff(r, cfg.n_subtract)
    vec = bob_pure_conditional(r, cfg.n_subtract, spec, cutoff)
    return vec.projector(), None


def _alpha_max(rho: DensityMatrix) -> float:
    nbar = float(np.dot(np.arange(rho.cutoff + 1), rho.populations()))
    return max(4.0, 2.0 * math.sqrt(nbar) + 1.0)


def figures_of_merit(cfg: ExperimentConfig) -> dict:
    rho, prob = bob_state(cfg)
    parity = 1 if cfg.n_subtract % 2 == 0 else -1
    # the fit uses real alpha, so undo the orientation set by theta
    fit = analysis.best_amplitude(rho.rotated(math.pi / 2 - cfg.theta_rad), parity, _alpha_max(rho))
    rec = {
        "W00": analysis.w_origin(rho),
        "neg_volume": analysis.wigner_grid(rho, cfg.grid_extent, cfg.grid_resolution).negativity_volume(),
        "fidelity": fit.fidelity,
        "alpha_star": fit.alpha_star,
        "parity": "+" if parity == 1 else "-",
    }
    if prob is not None:
        rec["success_prob"] = prob
        if cfg.click_rate_hz is not None:
            rec["rate_hz"] = cfg.click_rate_hz * prob
    return rec


def cmd_prepare(cfg: ExperimentConfig, wigner_out=None, wigner_format="csv") -> dict:
    rec = figures_of_merit(cfg)
    if wigner_out:
        rho, _ = bob_state(cfg)
        write_wigner(wigner_out, analysis.wigner_grid(rho, cfg.grid_extent, cfg.grid_resolution), wigner_format)
    return rec


def _sweep_point(cfg: ExperimentConfig, axis: str, value) -> tuple:
    rec = figures_of_merit(cfg.replace(**{axis: value}))
    return (value, rec["W00"], rec["neg_volume"], rec["fidelity"], rec["alpha_star"], rec.get("success_prob", 0.0))


def worker_count() -> int:
    env = os.environ.get("RSPCAT_THREADS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValidationError(f"RSPCAT_THREADS must be an integer, got {env!r}") from None
        return max(1, n)
    return os.cpu_count() or 1


def cmd_sweep(cfg: ExperimentConfig, axis: str, values) -> list[tuple]:
    """Rows ordered by ascending axis value, independent of worker count."""
    if axis not in SWEEP_AXES:
        raise ValidationError(f"sweep axis must be one of {SWEEP_AXES}")
    kind = int if axis == "n_subtract" else float
    values = sorted({kind(v) for v in values})
    if not values:
        raise ValidationError("sweep needs at least one value")
    if axis == "squeezing_db":
        cfg = cfg.replace(V_s=None, V_a=None, squeezing_db=values[0])
    for v in values:
        cfg.replace(**{axis: v})  # validate every point before starting
    workers = min(worker_count(), len(values))
    if workers <= 1:
        return [_sweep_point(cfg, axis, v) for v in values]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_point, [cfg] * len(values), [axis] * len(values), values))


def cmd_optimum(n: int, scheme: str, s_grid) -> analysis.SqueezingScan:
    return analysis.optimal_squeezing(n, scheme, s_grid)


def _truth_state(kind: str, cfg_factory, alpha: float, cutoff: int):
    if kind == "vacuum":
        return fock(0, cutoff).projector()
    if kind == "fock1":
        return fock(1, cutoff).projector()
    if kind == "cat":
        return cat(alpha, -1, cutoff).projector()
    if kind == "prepared":
        return bob_state(cfg_factory())[0]
    raise ValidationError(f"unknown state {kind!r}")


def cmd_tomography(samples, cutoff: int, truth=None, max_iters: int = 2000, tol: float = 1e-10):
    res = tomography.maxlik_reconstruct(samples, cutoff, max_iters=max_iters, tol=tol)
    rec = {
        "n_samples": len(samples),
        "n_angles": int(samples.angles().size),
        "cutoff": cutoff,
        "iterations": res.iterations,
        "converged": res.converged,
        "log_likelihood": float(res.log_likelihood[-1]),
    }
    if truth is not None:
        from .fockcore import state_fidelity

        rec["fidelity"] = state_fidelity(truth, res.rho)
    return rec, res


# ---------------------------------------------------------------------------
# output formats


def write_wigner(path, grid: analysis.WignerGrid, fmt: str = "csv"):
    """CSV rows ``x,p,W`` (x outer, p inner) or packed little-endian float64.

    The binary form starts with three text lines ``nx <int>``, ``ny <int>``,
    ``extent <float>`` followed by ``values`` row-major (p rows, x columns).
    """
    if fmt == "csv":
        with open(path, "w") as fh:
            fh.write("x,p,W\n")
            for i, x in enumerate(grid.xs):
                for j, p in enumerate(grid.ps):
                    fh.write(f"{_fmt(x)},{_fmt(p)},{_fmt(grid.values[j, i])}\n")
    elif fmt == "bin":
        with open(path, "wb") as fh:
            header = f"nx {grid.xs.size}\nny {grid.ps.size}\nextent {_fmt(float(grid.xs[-1]))}\n"
            fh.write(header.encode("ascii"))
            fh.write(np.ascontiguousarray(grid.values, dtype="<f8").tobytes())
    else:
        raise ValidationError(f"unknown wigner format {fmt!r}")


def read_wigner_bin(path) -> analysis.WignerGrid:
    with open(path, "rb") as fh:
        nx = int(fh.readline().split()[1])
        ny = int(fh.readline().split()[1])
        extent = float(fh.readline().split()[1])
        vals = np.frombuffer(fh.read(), dtype="<f8").reshape(ny, nx)
    return analysis.WignerGrid(np.linspace(-extent, extent, nx), np.linspace(-extent, extent, ny), vals.copy())


def write_matrix_csv(path, rho: DensityMatrix):
    with open(path, "w") as fh:
        fh.write("m,n,re,im\n")
        for m in range(rho.cutoff + 1):
            for n in range(rho.cutoff + 1):
                z = rho.elems[m, n]
                fh.write(f"{m},{n},{_fmt(z.real)},{_fmt(z.imag)}\n")


def _write_csv(fh, header, rows):
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(str(v) if isinstance(v, (int, np.integer)) else _fmt(v) for v in row) + "\n")


def _emit_json(rec: dict, path=None):
    text = json.dumps(rec, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument parsing

_OVERRIDES = (
    ("--squeezing-db", "squeezing_db"),
    ("--vs", "V_s"),
    ("--va", "V_a"),
    ("--eta-a", "eta_A"),
    ("--eta-b", "eta_B"),
    ("--n-subtract", "n_subtract"),
    ("--theta", "theta_rad"),
    ("--window", "window_dx"),
    ("--cutoff", "cutoff"),
    ("--grid-extent", "grid_extent"),
    ("--grid-resolution", "grid_resolution"),
    ("--seed", "seed"),
    ("--click-rate", "click_rate_hz"),
)


def _add_config_args(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key=value config file")
    g = p.add_argument_group("config overrides (flags win over the file)")
    for flag, key in _OVERRIDES:
        g.add_argument(flag, dest=f"ov_{key}", metavar=key.upper(), help=f"override '{key}'")


def _config_from_args(args) -> ExperimentConfig:
    overrides = {}
    for _, key in _OVERRIDES:
        raw = getattr(args, f"ov_{key}", None)
        if raw is not None:
            overrides[key] = coerce_value(key, raw)
    if args.config:
        return load_config(args.config, overrides)
    return parse_config("", overrides)


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"cannot parse value list {text!r}") from None


def _grid_values(args) -> list[float]:
    if args.values:
        return _float_list(args.values)
    if args.start is None or args.stop is None or args.step is None:
        raise ValidationError("give --values or all of --start/--stop/--step")
    if args.step <= 0:
        raise ValidationError("--step must be > 0")
    count = int(math.floor((args.stop - args.start) / args.step + 1e-9)) + 1
    return [round(args.start + i * args.step, 12) for i in range(max(count, 0))]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rspcat", description="Remote cat-state preparation simulator.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="figures of merit for one configuration")
    _add_config_args(p)
    p.add_argument("--out", help="JSON report path (default stdout)")
    p.add_argument("--wigner-out", help="also write the Wigner grid here")
    p.add_argument("--wigner-format", choices=("csv", "bin"), default="csv")

    p = sub.add_parser("sweep", help="figures of merit along one axis")
    _add_config_args(p)
    p.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p.add_argument("--values", help="comma-separated axis values")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--out", help="CSV path (default stdout)")

    p = sub.add_parser("optimum", help="optimal squeezing for n-photon subtraction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--scheme", default="TMSS", type=str.upper, choices=analysis.SCHEMES)
    p.add_argument("--s-min", type=float, default=0.1)
    p.add_argument("--s-max", type=float, default=10.0)
    p.add_argument("--s-step", type=float, default=0.1)
    p.add_argument("--out", help="per-squeezing CSV path")
    p.add_argument("--summary-out", help="summary CSV path (JSON summary always goes to stdout)")

    p = sub.add_parser("tomography", help="MaxLik round trip")
    _add_config_args(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--samples", help="CSV with columns theta_rad,x")
    src.add_argument("--generate", action="store_true", help="simulate samples from --state")
    p.add_argument("--state", default="prepared", choices=("prepared", "vacuum", "fock1", "cat"))
    p.add_argument("--alpha", type=float, default=0.65, help="amplitude for --state cat")
    p.add_argument("--angles", type=int, default=12)
    p.add_argument("--count", type=int, default=8334, help="samples per angle")
    p.add_argument("--rec-cutoff", type=int, default=15)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--samples-out", help="write the generated samples as CSV")
    p.add_argument("--rho-out", help="write the reconstructed matrix as CSV (m,n,re,im)")
    p.add_argument("--out", help="JSON report path (default stdout)")

    p = sub.add_parser("wigner-grid", help="write Bob's Wigner function on a grid")
    _add_config_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "bin"), default="csv")
    return ap


def _run(args) -> int:
    if args.command == "prepare":
        cfg = _config_from_args(args)
        _emit_json(cmd_prepare(cfg, args.wigner_out, args.wigner_format), args.out)
    elif args.command == "sweep":
        cfg = _config_from_args(args)
        rows = cmd_sweep(cfg, args.axis, _grid_values(args))
        if args.out:
            with open(args.out, "w") as fh:
                _write_csv(fh, SWEEP_COLUMNS, rows)
        else:
            _write_csv(sys.stdout, SWEEP_COLUMNS, rows)
    elif args.command == "optimum":
        if args.s_step <= 0 or args.s_max < args.s_min:
            raise ValidationError("need s_step > 0 and s_max >= s_min")
        count = int(math.floor((args.s_max - args.s_min) / args.s_step + 1e-9)) + 1
        grid = [round(args.s_min + i * args.s_step, 12) for i in range(count)]
        scan = cmd_optimum(args.n, args.scheme, grid)
        if args.out:
            with open(args.out, "w") as fh:
                _write_csv(fh, ("s_db", "alpha_star", "fidelity"), zip(scan.s_grid, scan.alphas, scan.fidelities))
        summary = (scan.n, scan.scheme, scan.s_star, scan.alpha_star, scan.f_star)
        if args.summary_out:
            with open(args.summary_out, "w") as fh:
                fh.write("n,scheme,s_star_db,alpha_star,F_star\n")
                fh.write(f"{summary[0]},{summary[1]},{_fmt(summary[2])},{_fmt(summary[3])},{_fmt(summary[4])}\n")
        _emit_json(dict(zip(("n", "scheme", "s_star_db", "alpha_star", "F_star"), summary)))
    elif args.command == "tomography":
        truth = None
        if args.samples:
            samples = tomography.read_samples_csv(args.samples)
        else:
            if args.angles < 1 or args.count < 1:
                raise ValidationError("--angles and --count must be >= 1")
            cfg = _config_from_args(args) if args.state == "prepared" else None
            seed = cfg.seed if cfg is not None else (int(args.ov_seed) if args.ov_seed else 0)
            truth = _truth_state(args.state, lambda: cfg, args.alpha, 40)
            samples = tomography.sample(truth, tomography.uniform_angles(args.angles), args.count, seed)
            if args.samples_out:
                tomography.write_samples_csv(args.samples_out, samples)
        rec, res = cmd_tomography(samples, args.rec_cutoff, truth, args.max_iters)
        if args.rho_out:
            write_matrix_csv(args.rho_out, res.rho)
        _emit_json(rec, args.out)
    elif args.command == "wigner-grid":
        cfg = _config_from_args(args)
        rho, _ = bob_state(cfg)
        write_wigner(args.out, analysis.wigner_grid(rho, cfg.grid_extent, cfg.grid_resolution), args.format)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ValidationError as exc:
        print(f"rspcat: error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"rspcat: numerical failure: {exc}", file=sys.stderr)
        return 1
    except RspcatError as exc:  # pragma: no cover - every subclass is mapped above
        print(f"rspcat: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
