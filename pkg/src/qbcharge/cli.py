"""Command-line interface.

Subcommands
-----------
simulate     one charging run; prints the summary, optionally writes
             the trajectory CSV plus sibling summary file
sweep-tau    stored energy and power for both protocols over charging times
sweep-gamma  final stored energy against one decoherence rate
emit-pulses  tabulate drive, assistant, and frame-rotated pulse strengths
check-cd     numeric-vs-analytic counter-diabatic consistency check
check-frame  rotated-frame equivalence check of the two-laser protocol

Exit status: 0 success, 1 configuration/usage error, 2 numerical failure
(including a failed consistency check).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fileio, pulses
from .errors import ConfigError, QBChargeError
from .experiments import (SweepSpec, default_gamma_grid, default_tau_grid,
                          run_protocol, sweep_gamma, sweep_tau,
                          verify_cd_consistency)
from .hamiltonian import ProtocolSpec, rotation_frame_u
from .propagator import ground_state, propagate_pure_protocol
from .pulses import PulseSpec


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageError(message)


def _add_config(p, required=False):
    p.add_argument("--config", required=required,
                   help="path to a key: value configuration document")
    p.add_argument("--output", help="output path (overrides config)")


def _load(args, required=True) -> fileio.RunConfig | None:
    if args.config is None:
        if required:
            raise ConfigError("--config is required for this subcommand")
        return None
    return fileio.load_config(args.config)


def _default_cfg(cfg: fileio.RunConfig | None, **overrides) -> fileio.RunConfig:
    if cfg is not None:
        return cfg
    base = {"protocol": "sta", "family": "gaussian", "omega0_tau_c": 7.2,
            "samples": 300}
    base.update(overrides)
    return fileio.RunConfig(**base)


def _meta(cfg: fileio.RunConfig, protocol=None) -> dict:
    return {"protocol": protocol or cfg.protocol, "family": cfg.family,
            "omega0_tau_c": cfg.omega0_tau_c, "gamma_minus": cfg.gamma_minus,
            "gamma_z": cfg.gamma_z, "level_ratio": cfg.level_ratio,
            "omega0": 1.0}


def _cmd_simulate(args) -> int:
    cfg = _load(args)
    traj, report = run_protocol(cfg.protocol_spec(), cfg.decoherence_spec(),
                                samples=cfg.samples,
                                extend_factor=cfg.extend_factor,
                                rtol=cfg.rtol, atol=cfg.atol)
    summary = fileio.summary_mapping(_meta(cfg), report, traj)
    output = args.output or cfg.output
    if output:
        spath = fileio.write_trajectory(traj, report, output, _meta(cfg))
        print(f"trajectory: {output}")
        print(f"summary: {spath}")
    sys.stdout.write(fileio.format_summary(summary))
    return 0


def _sweep_base(cfg: fileio.RunConfig, variable, values) -> SweepSpec:
    pulse = PulseSpec(family=cfg.family, omega0=1.0, tau_c=max(values))
    base = ProtocolSpec(protocol="stirap", pulse=pulse,
                        detuning=cfg.detuning, level_ratio=cfg.level_ratio)
    return SweepSpec(variable=variable, values=values, base=base,
                     decoherence=cfg.decoherence_spec(),
                     samples_per_run=max(cfg.samples, 100))


def _values(args, cfg, default) -> tuple:
    if args.values:
        return tuple(float(v) for v in args.values.split(","))
    if cfg is not None and cfg.sweep_values:
        return cfg.sweep_values
    return tuple(default)


def _cmd_sweep_tau(args) -> int:
    cfg = _default_cfg(_load(args, required=False))
    values = _values(args, cfg, default_tau_grid(args.points))
    spec = _sweep_base(cfg, "tau_c", values)
    result = sweep_tau(spec, rtol=cfg.rtol, atol=cfg.atol)
    output = args.output or cfg.output
    if not output:
        raise ConfigError("an output path is required (--output or config)")
    fileio.write_sweep(result, output)
    print(f"sweep-tau: {len(result.rows)} rows -> {output}")
    return 0


def _cmd_sweep_gamma(args) -> int:
    cfg = _default_cfg(_load(args, required=False))
    channel = args.channel or cfg.channel
    if channel is None:
        raise ConfigError("--channel is required (dissipation or dephasing)")
    variable = "gamma_minus" if channel == "dissipation" else "gamma_z"
    values = _values(args, cfg, default_gamma_grid(args.points))
    spec = _sweep_base(cfg, variable, values)
    result = sweep_gamma(spec, channel, sta_tau=args.sta_tau,
                         stirap_tau=args.stirap_tau,
                         rtol=cfg.rtol, atol=cfg.atol)
    output = args.output or cfg.output
    if not output:
        raise ConfigError("an output path is required (--output or config)")
    fileio.write_sweep(result, output)
    print(f"sweep-gamma[{channel}]: {len(result.rows)} rows -> {output}")
    return 0


def _cmd_emit_pulses(args) -> int:
    cfg = _load(args)
    output = args.output or cfg.output
    if not output:
        raise ConfigError("an output path is required (--output or config)")
    samples = args.samples or cfg.samples
    grid = np.linspace(0.0, cfg.omega0_tau_c, samples)
    fileio.write_pulse_table(cfg.pulse_spec(), grid, output)
    print(f"emit-pulses: {samples} rows -> {output}")
    return 0


def _cmd_check_cd(args) -> int:
    cfg = _default_cfg(_load(args, required=False))
    pulse = cfg.pulse_spec()
    spec = ProtocolSpec(protocol="sta", pulse=pulse,
                        level_ratio=cfg.level_ratio)
    grid = np.linspace(0.0, pulse.tau_c, args.grid_points)
    dt = args.dt_fraction * pulse.tau_c
    rep = verify_cd_consistency(spec, grid, dt=dt)
    ok = rep.max_error <= args.threshold
    print(f"family: {pulse.family}")
    print(f"dt: {fileio.fmt(dt)}")
    print(f"max_error: {fileio.fmt(rep.max_error)} at t = "
          f"{fileio.fmt(rep.argmax_time)}")
    print(f"checked: {rep.n_checked} skipped: {rep.n_skipped}")
    print(f"threshold: {fileio.fmt(args.threshold)} -> "
          f"{'PASS' if ok else 'FAIL'}")
    return 0 if ok else 2


def _cmd_check_frame(args) -> int:
    cfg = _default_cfg(_load(args, required=False))
    pulse = cfg.pulse_spec()
    if cfg.detuning != 0.0:
        raise ConfigError("check-frame requires detuning = 0")
    sta = ProtocolSpec(protocol="sta", pulse=pulse,
                       level_ratio=cfg.level_ratio)
    rotated = ProtocolSpec(protocol="sta_rotated", pulse=pulse,
                           level_ratio=cfg.level_ratio)
    grid = np.linspace(0.0, pulse.tau_c, args.grid_points)
    psi0 = ground_state()
    traj_sta = propagate_pure_protocol(sta, psi0, grid,
                                       rtol=cfg.rtol, atol=cfg.atol)
    u0 = rotation_frame_u(pulses.phi_angle(pulse, 0.0))
    traj_rot = propagate_pure_protocol(rotated, u0.conj().T @ psi0, grid,
                                       rtol=cfg.rtol, atol=cfg.atol)
    dev = 0.0
    for k, t in enumerate(grid):
        u = rotation_frame_u(pulses.phi_angle(pulse, t))
        dev = max(dev, float(np.linalg.norm(
            traj_rot.states[k] - u.conj().T @ traj_sta.states[k])))
    u_end = rotation_frame_u(pulses.phi_angle(pulse, grid[-1]))
    back = u_end @ traj_rot.states[-1]
    p3 = float(abs(back[2]) ** 2)
    ok = dev <= args.tolerance and p3 >= args.p3_min
    print(f"family: {pulse.family}")
    print(f"max_deviation: {fileio.fmt(dev)} (tolerance "
          f"{fileio.fmt(args.tolerance)})")
    print(f"final_p3_original_frame: {fileio.fmt(p3)} (minimum "
          f"{fileio.fmt(args.p3_min)})")
    print(f"final_p3_rotated_frame: "
          f"{fileio.fmt(abs(traj_rot.states[-1][2]) ** 2)}")
    print("PASS" if ok else "FAIL")
    return 0 if ok else 2


def build_parser() -> _Parser:
    parser = _Parser(prog="qbcharge",
                     description="three-level quantum battery charging "
                                 "simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one charging protocol")
    _add_config(p, required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep-tau", help="sweep the charging time")
    _add_config(p)
    p.add_argument("--values", help="comma-separated omega0*tau_c values")
    p.add_argument("--points", type=int, default=40,
                   help="grid size when --values is not given")
    p.set_defaults(func=_cmd_sweep_tau)

    p = sub.add_parser("sweep-gamma", help="sweep one decoherence rate")
    _add_config(p)
    p.add_argument("--channel", choices=("dissipation", "dephasing"))
    p.add_argument("--values", help="comma-separated gamma/omega0 values")
    p.add_argument("--points", type=int, default=40)
    p.add_argument("--sta-tau", type=float, default=None,
                   help="charging time for the assisted protocol (default 7.2)")
    p.add_argument("--stirap-tau", type=float, default=None,
                   help="charging time for the bare protocol (default 50)")
    p.set_defaults(func=_cmd_sweep_gamma)

    p = sub.add_parser("emit-pulses", help="tabulate pulse strengths")
    _add_config(p, required=True)
    p.add_argument("--samples", type=int, default=None)
    p.set_defaults(func=_cmd_emit_pulses)

    p = sub.add_parser("check-cd",
                       help="numeric vs analytic counter-diabatic check")
    _add_config(p)
    p.add_argument("--dt-fraction", type=float, default=1e-5,
                   help="differentiation step as a fraction of tau_c")
    p.add_argument("--grid-points", type=int, default=101)
    p.add_argument("--threshold", type=float, default=1e-6)
    p.set_defaults(func=_cmd_check_cd)

    p = sub.add_parser("check-frame", help="rotated-frame equivalence check")
    _add_config(p)
    p.add_argument("--grid-points", type=int, default=401)
    p.add_argument("--tolerance", type=float, default=1e-5)
    p.add_argument("--p3-min", type=float, default=0.99)
    p.set_defaults(func=_cmd_check_frame)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError:
        return 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"qbcharge: config error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"qbcharge: invalid value: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"qbcharge: i/o error: {exc}", file=sys.stderr)
        return 1
    except QBChargeError as exc:
        print(f"qbcharge: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
