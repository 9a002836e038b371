"""Command-line entry point.

Exit status: 0 no violations, 1 violations found, 2 configuration or input
error, 3 infeasible resolution (the scenario is unstable under the offset cap).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from . import __version__, _core
from .analysis import eq1_bound, eq2_R_max, eq4_L_max, exit_distribution, verify_trace
from .config import EMITTABLE, ConfigError, RunConfig, format_config, load_config, validate_config
from .engine import SimulationTrace, Unstable, run
from .scenario import FLOWS, InvalidScenario
from .traceio import TraceFormatError, read_trace, write_trace

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2, 3
SWEEP_PARAMS = ("theta", "L0", "seed")


def _metadata(trace: SimulationTrace) -> dict:
    return {**trace.metadata, "spec_hash": trace.spec.digest()}


def _write_header(fh, meta: dict) -> None:
    for k, v in meta.items():
        fh.write(f"# {k}: {v}\n")


def write_artifacts(trace: SimulationTrace, report, cfg: RunConfig, out: Path) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = []
    meta = _metadata(trace)
    if "trace" in cfg.emit:
        write_trace(trace, out / "trace.csv")
        written.append(out / "trace.csv")
    if "histogram" in cfg.emit:
        for flow in FLOWS:
            for label, before in (("start", True), ("exit", False)):
                hist = exit_distribution(trace, flow, cfg.bin_width, use_start_positions=before)
                path = out / f"histogram_{flow}_{label}.csv"
                path.write_text(hist.to_csv({**meta, "flow": flow, "values": label,
                                             "bin_width": cfg.bin_width}))
                written.append(path)
    if "report" in cfg.emit and report is not None:
        with open(out / "report.txt", "w") as fh:
            _write_header(fh, meta)
            fh.write(report.to_text())
        (out / "report.json").write_text(report.to_json() + "\n")
        written += [out / "report.txt", out / "report.json"]
    return written


def execute(cfg: RunConfig, out: Path, quiet: bool = False) -> tuple[int, object]:
    """One run with artifacts; returns the exit status and the report (or ``None``)."""
    spec = cfg.spec()
    try:
        trace = run(spec)
    except Unstable as exc:
        print(f"error: {exc}", file=sys.stderr)
        if "trace" in cfg.emit:
            out.mkdir(parents=True, exist_ok=True)
            write_trace(exc.trace, out / "trace.partial.csv")
        return EXIT_INFEASIBLE, None
    report = verify_trace(trace)
    write_artifacts(trace, report, cfg, out)
    status = EXIT_OK if report.ok else EXIT_VIOLATION
    if cfg.oracle_check:
        from .oracle import cross_check

        checked, mismatches = cross_check(trace, cfg.oracle_samples, seed=spec.seed)
        for aid, got, want in mismatches:
            print(f"oracle mismatch: aircraft {aid}: resolved {got:.9g}, oracle {want:.9g}",
                  file=sys.stderr)
        if not quiet:
            print(f"oracle check: {checked - len(mismatches)}/{checked} agree")
        if mismatches:
            status = EXIT_VIOLATION
    if not quiet:
        print(report.to_text(), end="")
    if not report.ok:
        print(f"violations at aircraft: {' '.join(map(str, report.violating_ids[:50]))}",
              file=sys.stderr)
    return status, report


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    changes = {}
    if getattr(args, "emit", None) is not None:
        changes["emit"] = tuple(x.strip() for x in args.emit.split(",") if x.strip())
    if getattr(args, "horizon", None):
        changes["horizon"] = args.horizon
    if getattr(args, "oracle_check", False):
        changes["oracle_check"] = True
    if getattr(args, "workers", None):
        changes["workers"] = args.workers
    cfg = cfg.with_values(**changes)
    if getattr(args, "output_dir", None):
        cfg = cfg.with_values(output_dir=args.output_dir)
        os.environ.pop("CFS_OUTPUT_DIR", None)
    bad = [e for e in cfg.emit if e not in EMITTABLE]
    if bad:
        raise ConfigError("emit", f"unknown artifact {bad[0]!r}")
    validate_config(cfg)
    return cfg


def cmd_run(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    status, _ = execute(cfg, Path(cfg.resolved_output_dir()))
    return status


def _parse_values(param: str, text: str) -> list:
    items = [x.strip() for x in text.split(",") if x.strip()]
    if not items:
        raise ConfigError("values", "empty value list")
    conv = int if param == "seed" else float
    try:
        return [conv(x) for x in items]
    except ValueError as exc:
        raise ConfigError("values", str(exc)) from None


def _sweep_one(args):
    cfg, out = args
    try:
        status, report = execute(cfg, out, quiet=True)
    except (ConfigError, InvalidScenario) as exc:
        return EXIT_CONFIG, None, str(exc)
    return status, report, ""


def cmd_sweep(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    if args.param not in SWEEP_PARAMS:
        raise ConfigError("param", f"must be one of {', '.join(SWEEP_PARAMS)}")
    values = _parse_values(args.param, args.values)
    root = Path(cfg.resolved_output_dir())
    jobs = []
    if args.param == "theta" and cfg.kind == "orthogonal":
        # an angle sweep of thin flows is the angle geometry; 90 degrees matches orthogonal
        cfg = cfg.with_values(kind="angle")
    if args.param == "L0" and cfg.kind != "pseudo_random":
        cfg = cfg.with_values(kind="pseudo_random")
    for v in values:
        sub = cfg.with_values(**{args.param: v})
        try:
            validate_config(sub)
        except ConfigError as exc:
            reason = str(exc).split(": ", 2)[-1]
            raise ConfigError(args.param, f"value {v:g}: {reason}") from None
        jobs.append((sub, root / f"{args.param}_{v:g}"))
    if cfg.workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]

    header = ["value", "status", "max_offset", "eq1", "eq2_R_max", "eq4_L_max",
              "max_exit_R_side", "max_exit_L_side", "eq3_violations", "bound_violations",
              "safety_violations"]
    rows = []
    first_failure = None
    for v, (status, rep, err) in zip(values, results):
        if status != EXIT_OK and first_failure is None:
            first_failure = (v, status, err)
        if rep is None:
            rows.append([f"{v:g}", str(status)] + [""] * (len(header) - 2))
            continue
        eq1 = "" if rep.eq1 is None else f"{rep.eq1:.9g}"
        r_side = max(m.max_exit_R_side for m in rep.flows.values())
        l_side = max(m.max_exit_L_side for m in rep.flows.values())
        rows.append([f"{v:g}", str(status), f"{rep.max_offset:.9g}", eq1,
                     f"{rep.eq2_R_max:.9g}", f"{rep.eq4_L_max:.9g}", f"{r_side:.9g}",
                     f"{l_side:.9g}", str(rep.per_aircraft_eq3_violations),
                     str(rep.bound_violations), str(rep.safety_violations)])
    root.mkdir(parents=True, exist_ok=True)
    table = root / f"sweep_{args.param}.csv"
    with open(table, "w") as fh:
        _write_header(fh, {"param": args.param, "version": __version__,
                           "backend": _core.BACKEND, "config_hash": cfg.spec().digest()})
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    widths = [max(len(h), *(len(r[k]) for r in rows)) for k, h in enumerate(header)]
    print("  ".join(h.rjust(w) for h, w in zip(header, widths)))
    for row in rows:
        print("  ".join(c.rjust(w) for c, w in zip(row, widths)))
    if first_failure is None:
        return EXIT_OK
    v, status, err = first_failure
    print(f"first failure: {args.param}={v:g} (exit {status}) {err}".rstrip(), file=sys.stderr)
    return max(status for status, _, _ in results)


def cmd_verify(args) -> int:
    try:
        trace = read_trace(args.trace)
    except TraceFormatError as exc:
        print(f"error: {args.trace}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidScenario as exc:
        print(f"error: {args.trace}: scenario header: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = verify_trace(trace)
    print(report.to_text(), end="")
    if not report.ok:
        for aid in report.violating_ids:
            print(f"violation: aircraft {aid}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_defaults(args) -> int:
    print(format_config(RunConfig()), end="")
    return EXIT_OK


def cmd_bounds(args) -> int:
    theta = math.radians(args.theta)
    print(f"eq1_d_max: {eq1_bound(theta, args.sep):.9g}")
    print(f"eq2_R_max: {eq2_R_max(args.L0, args.sep):.9g}")
    print(f"eq4_L_max: {eq4_L_max(args.L0, args.sep):.9g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    defaults = format_config(RunConfig()).replace("%", "%%")
    p = argparse.ArgumentParser(
        prog="cfs", formatter_class=argparse.RawDescriptionHelpFormatter,
        description="Sequential conflict resolution of two aircraft flows crossing a "
                    "circular control area.",
        epilog="exit status: 0 ok, 1 violations, 2 configuration error, 3 infeasible\n"
               "env: CFS_OUTPUT_DIR overrides output_dir\n\ndefault config:\n" + defaults)
    p.add_argument("--version", action="version", version=f"cfs {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="config file ([scenario], [area], [run])")
        sp.add_argument("--emit", help="comma list of: " + ", ".join(EMITTABLE))
        sp.add_argument("--horizon", choices=("windowed", "unbounded"))
        sp.add_argument("--oracle-check", action="store_true",
                        help="cross-check sampled maneuvers against the brute-force oracle")
        sp.add_argument("--output-dir")

    sp = sub.add_parser("run", help="run one scenario")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", help="run one scenario per parameter value")
    common(sp)
    sp.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    sp.add_argument("--values", required=True, help="comma list; theta in degrees")
    sp.add_argument("--workers", type=int, help="parallel runs")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="re-check an exported trace")
    sp.add_argument("--trace", required=True)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("defaults", help="print the default config")
    sp.set_defaults(func=cmd_defaults)

    sp = sub.add_parser("bounds", help="print the closed-form bounds")
    sp.add_argument("--theta", type=float, default=90.0, help="degrees")
    sp.add_argument("--L0", type=float, default=0.0)
    sp.add_argument("--sep", type=float, default=5.0)
    sp.set_defaults(func=cmd_bounds)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
