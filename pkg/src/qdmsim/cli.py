"""Batch command-line front end.

Commands: eval, sweep, simulate, calibrate, plan.  Every command writes
its outputs plus a manifest (digest of the effective inputs, the seed, and
per-file checksums) into the output directory; reruns with the same config
and seed reproduce every file byte for byte.

Exit codes: 0 success, 1 config/usage error, 2 domain or numeric error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .config import RunConfig, default_config_text, parse_config
from .calibration import extract_times, read_trace_csv
from .errors import ConfigError, DomainError
from .montecarlo import SimConfig, simulate_protocol
from .scanplan import plan_acquisition, speedup_report
from .sensitivity import evaluate_point, sweep, time_reduction_factor
from .sequence import PROTOCOLS

_PROTOCOL_BY_NAME = {p.lower(): p for p in PROTOCOLS}


class _UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems map to exit code 1
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qdmsim", description=__doc__.splitlines()[0])
    parser.add_argument("--config", metavar="PATH",
                        help="config file (omit to use built-in defaults)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, **flags):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", metavar="DIR",
                       help="output directory (default: config output_dir)")
        p.add_argument("--seed", type=int, help="override master_seed")
        for flag, kw in flags.items():
            p.add_argument(flag, **kw)
        return p

    add("eval", "sensitivities of all three protocols at one point")
    add("sweep", "comparison grid over (I_conf, t_mw), written as CSV",
        **{"--pgm": dict(action="store_true",
                         help="also write P2 graymap heatmaps of the ratios")})
    add("simulate", "shot-noise Monte Carlo estimate of one protocol",
        **{"--protocol": dict(required=True,
                              choices=sorted(_PROTOCOL_BY_NAME)),
           "--trials": dict(type=int, help="override n_trials"),
           "--dump-trials": dict(action="store_true",
                                 help="write per-trial eta values as CSV")})
    add("calibrate", "extract t_ro / t_init from a delay-sweep trace CSV",
        **{"--trace": dict(required=True, metavar="PATH"),
           "--intensity": dict(type=float, metavar="MW_PER_UM2",
                               help="trace intensity (default: config I_conf)"),
           "--mode": dict(choices=["averaged", "instantaneous"],
                          default="averaged")})
    add("plan", "full-grid acquisition schedule and AOM RF table",
        **{"--protocol": dict(required=True,
                              choices=sorted(_PROTOCOL_BY_NAME))})
    return parser


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class _Run:
    """Collects output files, then writes them plus the manifest at once."""

    def __init__(self, command: str, cfg: RunConfig, cfg_text: str,
                 out_dir: Path, seed: int, extra_inputs: list[str]):
        self.command = command
        self.cfg = cfg
        self.seed = seed
        self.out_dir = out_dir
        digest = hashlib.sha256()
        digest.update(cfg_text.encode())
        digest.update(f"\ncommand={command}\nseed={seed}\n".encode())
        for item in extra_inputs:
            digest.update(item.encode())
        self.input_digest = digest.hexdigest()
        self.files: dict[str, str] = {}

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def flush(self) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        manifest = [
            f"command = {self.command}",
            f"qdmsim_version = {__version__}",
            f"inputs_sha256 = {self.input_digest}",
            f"master_seed = {self.seed}",
        ]
        for name in sorted(self.files):
            data = self.files[name].encode()
            (self.out_dir / name).write_bytes(data)
            manifest.append(f"output {name} sha256 {_sha256(data)}")
        (self.out_dir / "manifest.txt").write_text("\n".join(manifest) + "\n")


def _kv_block(pairs: list[tuple[str, object]]) -> str:
    return "\n".join(f"{k} = {v}" for k, v in pairs) + "\n"


def _cmd_eval(run: _Run, args) -> str:
    cfg = run.cfg
    cell = evaluate_point(cfg.model(), cfg.intensity_conf(), cfg.t_mw,
                          cfg.intensity_ls(), cfg.t1, cfg.t_d)
    report = _kv_block([
        ("i_conf_mw_per_um2", repr(cfg.intensity_conf())),
        ("i_ls_mw_per_um2", repr(cfg.intensity_ls())),
        ("t_mw_us", repr(cfg.t_mw)),
        ("eta_lc_sqrt_us", repr(cell.eta_lcqdm)),
        ("eta_leibold_sqrt_us", repr(cell.eta_leibold)),
        ("eta_conv_sqrt_us", repr(cell.eta_conventional)),
        ("ratio_leibold_lc", repr(cell.ratio_leibold_over_lc)),
        ("ratio_conv_lc", repr(cell.ratio_conv_over_lc)),
        ("time_reduction_conv_lc", repr(time_reduction_factor(cell.ratio_conv_over_lc))),
    ])
    run.add("eval_report.txt", report)
    return report


def _cmd_sweep(run: _Run, args) -> str:
    grid = sweep(run.cfg.sweep_spec())
    run.add("sweep.csv", grid.to_csv())
    if args.pgm:
        run.add("sweep_ratio_conv_lc.pgm", grid.to_pgm("conv_lc"))
        run.add("sweep_ratio_leibold_lc.pgm", grid.to_pgm("leibold_lc"))
    n_cells = len(grid.spec.i_conf_grid) * len(grid.spec.t_mw_grid)
    return (f"swept {n_cells} cells ({grid.n_valid} valid) -> "
            f"{run.out_dir / 'sweep.csv'}\n")


def _cmd_simulate(run: _Run, args) -> str:
    cfg = run.cfg
    protocol = _PROTOCOL_BY_NAME[args.protocol]
    n_trials = args.trials if args.trials is not None else cfg.n_trials
    sim = SimConfig(params=cfg.protocol_params(), model=cfg.model(),
                    i_conf=cfg.intensity_conf(), n_trials=n_trials,
                    master_seed=run.seed)
    trial_etas: Optional[list] = [] if args.dump_trials else None
    outcome = simulate_protocol(sim, protocol, trial_etas_out=trial_etas)
    report = _kv_block([
        ("protocol", outcome.protocol_tag),
        ("n_trials", outcome.n_trials),
        ("eta_empirical_sqrt_us", repr(outcome.eta_empirical)),
        ("eta_stderr_sqrt_us", repr(outcome.eta_stderr)),
        ("readouts_per_cycle", outcome.readouts_per_cycle),
        ("cycle_time_us", repr(outcome.cycle_time)),
        ("signal_mean", repr(outcome.signal_mean)),
        ("signal_stderr", repr(outcome.signal_stderr)),
    ] + [("warning", w) for w in outcome.warnings])
    run.add("simulate_report.txt", report)
    if trial_etas is not None:
        lines = ["trial,eta"]
        lines += [f"{i},{eta!r}" for i, eta in enumerate(trial_etas)]
        run.add("simulate_trials.csv", "\n".join(lines) + "\n")
    return report


def _cmd_calibrate(run: _Run, args) -> str:
    text = Path(args.trace).read_text()
    intensity = args.intensity if args.intensity is not None \
        else run.cfg.intensity_conf()
    trace = read_trace_csv(text, intensity)
    times = extract_times(trace, mode=args.mode)
    report = _kv_block([
        ("trace", Path(args.trace).name),
        ("intensity_mw_per_um2", repr(intensity)),
        ("mode", args.mode),
        ("n_samples", len(trace)),
        ("t_ro_us", repr(times.t_ro)),
        ("t_init_us", repr(times.t_init)),
        ("peak_contrast", repr(times.peak_contrast)),
    ] + [("warning", w) for w in times.warnings])
    run.add("calibrate_report.txt", report)
    return report


def _cmd_plan(run: _Run, args) -> str:
    cfg = run.cfg
    protocol = _PROTOCOL_BY_NAME[args.protocol]
    grid = cfg.voxel_grid()
    params = cfg.protocol_params()
    plan = plan_acquisition(grid, params, protocol, cal=cfg.aom_calibration(),
                            t_z_step=cfg.t_z_step)
    ratios = speedup_report(grid, params)
    run.add("plan_cycles.csv", plan.cycles_csv())
    run.add("plan_rf.csv", plan.rf_csv())
    report = _kv_block([
        ("protocol", protocol),
        ("n_voxels", grid.n_voxels),
        ("n_cycles", len(plan.cycles)),
        ("total_time_us", repr(plan.total_time)),
        ("total_lcqdm_us", repr(ratios.total_lcqdm)),
        ("total_leibold_us", repr(ratios.total_leibold)),
        ("total_conventional_us", repr(ratios.total_conventional)),
        ("speedup_conv_over_lc", repr(ratios.conventional_over_lcqdm)),
        ("speedup_leibold_over_lc", repr(ratios.leibold_over_lcqdm)),
    ])
    run.add("plan_report.txt", report)
    return report


_COMMANDS = {
    "eval": _cmd_eval,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "calibrate": _cmd_calibrate,
    "plan": _cmd_plan,
}


def main(argv: Optional[list[str]] = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        if args.config is not None:
            cfg_text = Path(args.config).read_text()
        else:
            cfg_text = default_config_text()
        cfg = parse_config(cfg_text)
        seed = args.seed if args.seed is not None else cfg.master_seed
        out_dir = Path(args.out if args.out is not None else cfg.output_dir)
        extra = []
        if args.command == "calibrate":
            extra = [Path(args.trace).read_text()]
        elif args.command == "simulate":
            extra = [f"protocol={args.protocol} trials={args.trials}"]
        elif args.command == "plan":
            extra = [f"protocol={args.protocol}"]
        run = _Run(args.command, cfg, cfg_text, out_dir, seed, extra)
        summary = _COMMANDS[args.command](run, args)
        run.flush()
        sys.stdout.write(summary)
        return 0
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
