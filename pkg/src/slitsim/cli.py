"""Batch front-end: ``sim fields|trajectories|epr|validate|render``.

Exit status: 0 success, 1 a validation check failed (or the integrator hit
a node), 2 bad configuration or input data, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import epr, formats, interference, trajectories
from .model import InvalidConfig, PhaseMode, load_config
from .oracle import compare_fields

log = logging.getLogger("slitsim")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3
COMMANDS = ("fields", "trajectories", "epr", "validate", "render")

ORACLE_TOL = 1e-9
CONTINUITY_TOL = 5e-4
ORDER_TARGET, ORDER_SLACK = 4.0, 0.3
EPR_TOL = 1e-12


class OutputError(OSError):
    pass


@dataclass(frozen=True)
class RunManifest:
    command: str
    config_path: Path | None
    out_dir: Path
    mode: PhaseMode | None = None
    seeds: int = 200
    probes: tuple = ()
    points: int = 65
    figures: bool = False
    config: object = field(default=None, compare=False)


def _prepare_out(path):
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {path}: {exc.strerror}") from exc
    return path


def _write(path, fn, *args):
    """Run ``fn(*args)`` (which writes ``path``), mapping OS errors to OutputError."""
    try:
        fn(*args)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def _probes(m):
    if m.probes:
        return m.probes
    return (m.config.slit1.x0 / 2.0,)


def cmd_fields(m):
    out = _prepare_out(m.out_dir)
    history = interference.evaluate_history(m.config, m.mode)
    _write(out / "fields.csv", formats.write_fields_csv, out / "fields.csv", history)
    _write(out / "intensity.pgm", formats.write_pgm, out / "intensity.pgm",
           formats.density_image(history.p_tot))
    written = [out / "fields.csv", out / "intensity.pgm"]
    if m.figures:
        from . import plotting
        written.append(_write(out / "density.png", plotting.density_map, history, out / "density.png"))
        written.append(_write(out / "entangling.png", plotting.entangling_map, history,
                              out / "entangling.png"))
    return written


def cmd_trajectories(m):
    out = _prepare_out(m.out_dir)
    cfg = m.config
    seeds = trajectories.seed_positions(cfg, m.seeds, m.mode)
    ts = trajectories.integrate(cfg, seeds, m.mode)
    ids = np.repeat(np.arange(1, len(ts) + 1), len(ts.times))
    t = np.tile(ts.times, len(ts))
    _write(out / "trajectories.csv", formats.write_table, out / "trajectories.csv",
           formats.TRAJ_HEADER, [ids, t, ts.positions])
    report = trajectories.no_crossing_check(ts)
    lines = [str(report), f"trajectories {len(ts)}", f"config_hash {ts.metadata['config_hash']}",
             f"mode {ts.metadata['mode']}"]
    reversals = {}
    for xp in _probes(m):
        tr = trajectories.reversal_time(cfg, xp, m.mode)
        reversals[xp] = tr
        lines.append(f"reversal_time x={formats.fmt(xp)} t_r={'none' if tr is None else formats.fmt(tr)}")
    path = out / "trajectories_report.txt"
    _write(path, path.write_text, "\n".join(lines) + "\n")
    written = [out / "trajectories.csv", path]
    if m.figures:
        from . import plotting
        history = interference.evaluate_history(cfg, m.mode)
        png = out / "trajectories.png"
        written.append(_write(png, plotting.density_map, history, png, ts))
        for i, (xp, tr) in enumerate(reversals.items(), start=1):
            j = trajectories.current_at(cfg, xp, m.mode)
            png = out / f"current_probe{i}.png"
            written.append(_write(png, plotting.current_trace, cfg.grid.t, j, png, xp, tr))
    return written, report


def epr_columns(points):
    pairs = {"P_D2_D4": epr.detector_pair("D2", "D4"), "P_D2_D3": epr.detector_pair("D2", "D3"),
             "P_D6_D4": epr.detector_pair("D6", "D4")}
    phi = epr.phi_scan(pairs["P_D2_D4"], points)[:, 0]
    return phi, {name: epr.phi_scan(pair, points)[:, 1] for name, pair in pairs.items()}


def cmd_epr(m):
    out = _prepare_out(m.out_dir)
    phi, cols = epr_columns(m.points)
    _write(out / "epr_scan.csv", formats.write_table, out / "epr_scan.csv", formats.EPR_HEADER,
           [phi, *cols.values()])
    written = [out / "epr_scan.csv"]
    if m.figures:
        from . import plotting
        written.append(_write(out / "epr_scan.png", plotting.epr_scan, phi, cols, out / "epr_scan.png"))
    return written


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def epr_checks(n_phi=64):
    d24, d23, d64 = (epr.detector_pair(*p) for p in (("D2", "D4"), ("D2", "D3"), ("D6", "D4")))
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi)
    err_eq = 0.0
    err_comp = 0.0
    err_shift = 0.0
    err_flat = 0.0
    for phi in phis:
        p24 = epr.conditional_probability(d24, phi, 0.0)
        p23 = epr.conditional_probability(d23, phi, 0.0)
        p64 = epr.conditional_probability(d64, phi, 0.0)
        err_eq = max(err_eq, abs(p24 - 0.5 * (1 + math.cos(phi))),
                     abs(p23 - 0.5 * (1 - math.cos(phi))), abs(p64 - 0.5))
        err_comp = max(err_comp, abs(p24 + p23 - 1.0))
        shifted = epr.conditional_probability(d24, phi + 0.7, 0.7)
        err_shift = max(err_shift, abs(shifted - p24))
        err_flat = max(err_flat, abs(epr.conditional_probability(d64, phi + 1.3, 0.0) - p64))
    return [
        Check("epr.closed_form", err_eq < EPR_TOL, f"max error {err_eq:.3g} (limit {EPR_TOL:g})"),
        Check("epr.complementarity", err_comp < EPR_TOL, f"max |P24 + P23 - 1| {err_comp:.3g}"),
        Check("epr.relative_phase_only", err_shift < EPR_TOL, f"max shift change {err_shift:.3g}"),
        Check("epr.which_way_flat", err_flat == 0.0, f"max change {err_flat:.3g}"),
    ]


def run_checks(cfg, mode=None, seeds=200, t_samples=9):
    """Every validation check for one configuration, in a fixed order."""
    checks = []
    idx = np.unique(np.linspace(0, cfg.grid.nt - 1, min(t_samples, cfg.grid.nt)).round().astype(int))
    cmp = compare_fields(cfg, cfg.grid.t[idx], mode)
    for name in ("density", "current", "velocity"):
        value = getattr(cmp, name)
        checks.append(Check(f"oracle.{name}", value < ORACLE_TOL,
                            f"max rel error {value:.3g} at (t, x) = {cmp.where[name]} "
                            f"(limit {ORACLE_TOL:g})"))

    if cfg.grid.nx >= 3 and cfg.grid.nt >= 3:
        base = interference.continuity_residual(cfg, mode)
        checks.append(Check("continuity.residual", base.relative < CONTINUITY_TOL,
                            f"{base.residual:.3g} = {base.relative:.3g} of max|dP/dt| "
                            f"(limit {CONTINUITY_TOL:g})"))
        if base.relative > 1e-8:
            fine = interference.continuity_residual(cfg, mode, cfg.grid.refined())
            ratio = base.residual / fine.residual if fine.residual > 0 else math.inf
            ok = abs(ratio - ORDER_TARGET) <= ORDER_SLACK * ORDER_TARGET
            checks.append(Check("continuity.order", ok, f"refinement ratio {ratio:.4g} "
                                f"(target {ORDER_TARGET:g} +/- {ORDER_SLACK:.0%})"))
        else:
            checks.append(Check("continuity.order", True, "skipped, residual at round-off level"))

    try:
        ts = trajectories.integrate(cfg, trajectories.seed_positions(cfg, seeds, mode), mode)
        report = trajectories.no_crossing_check(ts)
        checks.append(Check("trajectories.no_crossing", report.ok,
                            f"{report} ({len(ts)} seeds, {len(ts.times)} times)"))
    except (trajectories.NodeCollision, InvalidConfig) as exc:
        checks.append(Check("trajectories.no_crossing", False, str(exc)))

    checks.extend(epr_checks())
    return checks


def cmd_validate(m):
    out = _prepare_out(m.out_dir)
    checks = run_checks(m.config, m.mode, m.seeds)
    ok = all(c.passed for c in checks)
    text = "\n".join(c.line() for c in checks) + f"\nRESULT {'PASS' if ok else 'FAIL'}\n"
    _write(out / "validation.txt", (out / "validation.txt").write_text, text)
    return ok, checks


def cmd_render(m):
    out = _prepare_out(m.out_dir)
    _, _, p_tot = formats.read_fields_csv(m.out_dir / "fields.csv")
    path = out / "intensity.pgm"
    _write(path, formats.write_pgm, path, formats.density_image(p_tot))
    return [path]


def _parser():
    p = argparse.ArgumentParser(prog="sim", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="key = value configuration file")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--mode", choices=("paper", "qm"), help="override phase_mode from the config")
    p.add_argument("--seeds", type=int, default=200, help="number of trajectories (default 200)")
    p.add_argument("--probe", type=float, nargs="+", default=(), metavar="X",
                   help="probe positions for current reversal (default: half of slit1.x0)")
    p.add_argument("--points", type=int, default=65, help="phi samples for the epr scan")
    p.add_argument("--figures", action="store_true", help="also render PNG figures with matplotlib")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    needs_config = args.command in ("fields", "trajectories", "validate")
    try:
        if needs_config and args.config is None:
            raise InvalidConfig([("--config", f"required for '{args.command}'")])
        cfg = load_config(args.config) if args.config is not None else None
        if args.seeds < 1:
            raise InvalidConfig([("--seeds", "must be >= 1")])
        if args.points < 2:
            raise InvalidConfig([("--points", "must be >= 2")])
        m = RunManifest(command=args.command, config_path=args.config, out_dir=args.out,
                        mode=PhaseMode.parse(args.mode) if args.mode else None,
                        seeds=args.seeds, probes=tuple(args.probe), points=args.points,
                        figures=args.figures, config=cfg)
    except InvalidConfig as exc:
        print(f"sim: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"sim: cannot read config {args.config}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO

    try:
        if m.command == "fields":
            log.info("wrote %s", ", ".join(map(str, cmd_fields(m))))
        elif m.command == "trajectories":
            written, report = cmd_trajectories(m)
            log.info("wrote %s", ", ".join(map(str, written)))
            if not report.ok:
                print(f"sim: {report}", file=sys.stderr)
                return EXIT_FAIL
        elif m.command == "epr":
            log.info("wrote %s", ", ".join(map(str, cmd_epr(m))))
        elif m.command == "validate":
            ok, checks = cmd_validate(m)
            for c in checks:
                if not c.passed:
                    print(f"sim: check failed: {c.line()}", file=sys.stderr)
            return EXIT_OK if ok else EXIT_FAIL
        elif m.command == "render":
            log.info("wrote %s", ", ".join(map(str, cmd_render(m))))
    except trajectories.NodeCollision as exc:
        print(f"sim: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except formats.ParseError as exc:
        print(f"sim: parse error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidConfig as exc:
        print(f"sim: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"sim: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"sim: I/O error on {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
