"""Command-line driver: run orchestration, serialization, reports.

Subcommands:
  run           advance a configured simulation, stream NDJSON diagnostics
  oracle        verify the convolution inequalities on the analytic catalog
  fit-report    fit decay slopes from an NDJSON stream against rate targets
  maxfit        traveling-Maxwellian fit residual of a checkpointed field
  compare-free  weighted sup distance between a full run and free transport

Formats are bit-exact: NDJSON (one object per output time, keys matching
DiagnosticRecord fields) and LNDK binary checkpoints.
"""

import argparse
import dataclasses
import json
import os
import struct
import sys

import numpy as np

from .config import SimulationConfig, initial_data, parse_config
from .diagnostics import fit_decay_rate, null_structure_gain, sharp_cauchy_diff
from .errors import LandauError
from .maxwellian import fit_maxwellian
from .phase_state import DistributionField, Grid, bracket
from .stepper import run as run_sim
from .transport import free_solution, pullback_sharp

CHECKPOINT_MAGIC = b"LNDK"
CHECKPOINT_VERSION = 1


def save_checkpoint(path, f: DistributionField, gamma):
    """Write magic, version, header (dims, grid, gamma, t), then f (LE f64)."""
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", CHECKPOINT_VERSION))
        fh.write(struct.pack("<4q", g.d_x, g.d_v, g.n_x, g.n_v))
        fh.write(struct.pack("<4d", g.L_x, g.v_max, gamma, f.time))
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def load_checkpoint(path):
    """Inverse of save_checkpoint; returns (DistributionField, gamma)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CHECKPOINT_MAGIC:
            raise LandauError(f"{path}: bad checkpoint magic {magic!r}")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != CHECKPOINT_VERSION:
            raise LandauError(f"{path}: unsupported checkpoint version {version}")
        d_x, d_v, n_x, n_v = struct.unpack("<4q", fh.read(32))
        L_x, v_max, gamma, t = struct.unpack("<4d", fh.read(32))
        grid = Grid(d_x, d_v, n_x, n_v, L_x, v_max)
        count = int(np.prod(grid.shape))
        vals = np.frombuffer(fh.read(count * 8), dtype="<f8").reshape(grid.shape)
    return DistributionField(t, vals.copy(), grid), gamma


def record_to_json(rec):
    obj = dataclasses.asdict(rec)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def write_ndjson(path, records):
    with open(path, "w") as fh:
        for rec in records:
            fh.write(record_to_json(rec) + "\n")


def read_ndjson(path):
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def _threads_cap():
    cap = os.environ.get("LANDAU_THREADS")
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, cap)


def cmd_run(args):
    cfg = parse_config(args.config)
    outdir = args.output or cfg.output_directory
    os.makedirs(outdir, exist_ok=True)
    data = None
    if args.resume:
        data, _ = load_checkpoint(args.resume)

    ckpt_idx = [0]
    next_ckpt = [0.0]

    def checkpoint_cb(f):
        if cfg.checkpoint_every <= 0.0:
            return
        if f.time + 1e-9 >= next_ckpt[0]:
            path = os.path.join(outdir, f"checkpoint_{ckpt_idx[0]:05d}.lndk")
            save_checkpoint(path, f, cfg.gamma)
            ckpt_idx[0] += 1
            next_ckpt[0] += cfg.checkpoint_every

    art = run_sim(cfg, data=data, checkpoint_cb=checkpoint_cb)
    ndjson_path = os.path.join(outdir, "diagnostics.ndjson")
    write_ndjson(ndjson_path, art.records)
    save_checkpoint(os.path.join(outdir, "final.lndk"), art.final, cfg.gamma)
    if not args.quiet:
        print(f"wrote {len(art.records)} records to {ndjson_path}")
        print(f"clipped mass {art.clipped_mass:.3e}")
    return 0


def cmd_oracle(args):
    from .oracles import check_dispersion, check_hls, check_interpolation, default_catalog
    cat = default_catalog()
    failures = 0
    print(f"{'check':<16}{'function':<18}{'nu':>5}  {'ratio':>12}")
    for h in cat:
        for nu in (0.5, 1.0, 1.5, 2.5):
            rep = check_interpolation(h, nu)
            print(f"{'interpolation':<16}{rep['name']:<18}{nu:>5}  {rep['ratio']:>12.4f}")
            if not np.isfinite(rep["ratio"]):
                failures += 1
    disp = check_dispersion()
    worst = max(r["ratio"] for r in disp)
    print(f"{'dispersion':<16}{'gaussian':<18}{'-':>5}  {worst:>12.4f}")
    for h in cat[:4]:
        for nu, branch in ((1.0, "L15over4nu"), (2.0, "L2"), (2.5, "L2")):
            rep = check_hls(h, nu, branch)
            print(f"{'hls-' + branch:<16}{rep['name']:<18}{nu:>5}  {rep['ratio']:>12.4f}")
            if not np.isfinite(rep["ratio"]):
                failures += 1
    return 2 if failures else 0


def cmd_fit_report(args):
    rows = read_ndjson(args.ndjson)
    cfg = parse_config(args.config) if args.config else None
    d_x = cfg.d_x if cfg else args.d_x
    window = cfg.fit_window if cfg else (5.0, rows[-1]["t"])
    targets = {
        "rho_sup": (-float(d_x), 0.1),
        "a_bar_plain_sup": (-1.0, 0.15),
    }
    code = 0
    for key, (target, tol) in targets.items():
        series = [(r["t"], r[key]) for r in rows if r[key] > 0.0]
        try:
            slope, err = fit_decay_rate(series, window)
        except LandauError as exc:
            print(f"{key}: skipped ({exc})")
            continue
        ok = abs(slope - target) <= tol
        print(f"{key}: slope {slope:+.3f} target {target:+.1f} +/- {tol} "
              f"-> {'pass' if ok else 'FAIL'}")
        if not ok:
            code = 2
    plain = [(r["t"], r["a_bar_plain_sup"]) for r in rows if r["a_bar_plain_sup"] > 0]
    weighted = [(r["t"], r["a_bar_weighted_sup"]) for r in rows if r["a_bar_weighted_sup"] > 0]
    if len(plain) >= 5 and len(weighted) >= 5:
        gain = null_structure_gain(plain, weighted, window)
        print(f"null_structure_gain: {gain:+.3f}")
    return code


def cmd_maxfit(args):
    f, gamma = load_checkpoint(args.checkpoint)
    sharp = pullback_sharp(f)
    fit = fit_maxwellian(sharp)
    norm = float(np.sqrt(np.sum(sharp.values ** 2) * sharp.grid.cell_volume))
    print(f"t {f.time:.3f} residual {fit.residual:.6e} field_l2 {norm:.6e} "
          f"relative {fit.residual / norm:.6e} converged {fit.converged}")
    print(f"params m {fit.params.m:.6g} alpha {fit.params.alpha:.6g} "
          f"sigma {fit.params.sigma:.6g} beta {fit.params.beta:.6g}")
    return 0


def cmd_compare_free(args):
    cfg = parse_config(args.config)
    data = initial_data(cfg)
    art = run_sim(cfg, data=data)
    l, m = cfg.weight_powers
    print(f"{'t':>8}  {'weighted_sup_diff':>18}")
    for rec in art.records:
        t = rec.t
        free = free_solution(data, t)
        # compare in sharp coordinates so both fields share a time slice
        free_sharp = pullback_sharp(free)
        diff = None
        if t in art.sharp_snapshots:
            diff = sharp_cauchy_diff(art.sharp_snapshots[t], free_sharp, l, m)
        print(f"{t:8.2f}  {rec.sharp_diff_vs_t0:18.6e}" +
              (f"  {diff:.6e}" if diff is not None else ""))
    return 0


def main(argv=None):
    _threads_cap()
    parser = argparse.ArgumentParser(prog="landau")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="advance a configured simulation")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--output", default=None)
    p_run.add_argument("--resume", default=None)
    p_run.add_argument("--quiet", action="store_true")
    p_run.set_defaults(func=cmd_run)

    p_or = sub.add_parser("oracle", help="verify convolution inequalities")
    p_or.add_argument("--quiet", action="store_true")
    p_or.set_defaults(func=cmd_oracle)

    p_fit = sub.add_parser("fit-report", help="decay-slope report from NDJSON")
    p_fit.add_argument("ndjson")
    p_fit.add_argument("--config", default=None)
    p_fit.add_argument("--d-x", type=int, default=1, dest="d_x")
    p_fit.set_defaults(func=cmd_fit_report)

    p_max = sub.add_parser("maxfit", help="traveling-Maxwellian fit residual")
    p_max.add_argument("checkpoint")
    p_max.set_defaults(func=cmd_maxfit)

    p_cmp = sub.add_parser("compare-free", help="full run vs free transport")
    p_cmp.add_argument("--config", required=True)
    p_cmp.set_defaults(func=cmd_compare_free)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LandauError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
