"""Run-configuration parsing and bit-stable result serialization.

The configuration document is line-oriented ``key: value`` text;
``#`` starts a comment, blank lines are ignored, keys may appear once.
Unknown keys are rejected.  All numbers are written back with 12
significant digits in locale-independent formatting, so repeated runs
of the same build emit byte-identical files.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigError
from .experiments import SweepResult
from .hamiltonian import PROTOCOLS, ProtocolSpec
from .metrics import ChargeReport, energy_series, instantaneous_power
from .propagator import DecoherenceSpec, Trajectory
from .pulses import FAMILIES, PulseSpec

TRAJECTORY_HEADER = "t,omega0_t,p1,p2,p3,W_norm,P_inst"
PULSE_HEADER = "t,omega0_t,omega1,omega2,omega_a,omega1_tilde,omega2_tilde"
SUMMARY_FIELDS = ("protocol", "family", "omega0_tau_c", "gamma_minus",
                  "gamma_z", "W_norm_final", "P_avg", "p1_final", "p2_final",
                  "p3_final", "max_norm_drift", "max_trace_drift")

REQUIRED_KEYS = ("protocol", "family", "omega0_tau_c")


def fmt(x) -> str:
    """12-significant-digit, locale-independent number formatting."""
    return format(float(x), ".12g")


@dataclass
class RunConfig:
    """Validated contents of one configuration document."""

    protocol: str
    family: str
    omega0_tau_c: float
    alpha: float | None = None
    sigma: float | None = None
    beta: float | None = None
    detuning: float = 0.0
    level_ratio: float = 0.3809
    gamma_minus: float = 0.0
    gamma_z: float = 0.0
    samples: int = 1000
    rtol: float = 1e-9
    atol: float = 1e-12
    extend_factor: float = 1.0
    sweep_values: tuple | None = None
    channel: str | None = None
    output: str | None = None

    def pulse_spec(self) -> PulseSpec:
        # omega0 = 1 internally: times and rates are the dimensionless
        # omega0*t and gamma/omega0 of the figures
        return PulseSpec(family=self.family, omega0=1.0,
                         tau_c=self.omega0_tau_c, alpha=self.alpha,
                         sigma=self.sigma, beta=self.beta)

    def protocol_spec(self) -> ProtocolSpec:
        return ProtocolSpec(protocol=self.protocol, pulse=self.pulse_spec(),
                            detuning=self.detuning,
                            level_ratio=self.level_ratio)

    def decoherence_spec(self) -> DecoherenceSpec:
        return DecoherenceSpec(gamma_minus=self.gamma_minus,
                               gamma_z=self.gamma_z)


def _parse_float(raw, key, line):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key} expects a number, got {raw!r}",
                          line=line, field=key) from None


def _parse_int(raw, key, line):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key} expects an integer, got {raw!r}",
                          line=line, field=key) from None


def _parse_values(raw, key, line):
    out = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            raise ConfigError(f"{key} has an empty entry", line=line, field=key)
        out.append(_parse_float(part, key, line))
    return tuple(out)


_ENUMS = {
    "protocol": PROTOCOLS,
    "family": FAMILIES,
    "channel": ("dissipation", "dephasing"),
}

_POSITIVE = ("omega0_tau_c", "sigma", "rtol", "atol")
_NONNEGATIVE = ("gamma_minus", "gamma_z")


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document.

    Raises :class:`~qbcharge.errors.ConfigError` with the line (and
    where meaningful, column) of the offending content; an empty
    document reports the full list of required keys.
    """
    known = {f.name for f in fields(RunConfig)}
    seen: dict = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if ":" not in line:
            raise ConfigError("expected 'key: value'", line=lineno,
                              column=len(line) + 1)
        key, _, raw = line.partition(":")
        column = len(key) + 2
        key = key.strip().lower()
        raw = raw.strip()
        if key not in known:
            raise ConfigError(f"unknown key {key!r}", line=lineno, field=key)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}", line=lineno, field=key)
        if not raw:
            raise ConfigError(f"{key} has no value", line=lineno,
                              column=column, field=key)

        if key in _ENUMS:
            value = raw.lower().replace("-", "_")
            if value not in _ENUMS[key]:
                raise ConfigError(
                    f"{key} must be one of {_ENUMS[key]}, got {raw!r}",
                    line=lineno, field=key)
        elif key == "samples":
            value = _parse_int(raw, key, lineno)
        elif key == "sweep_values":
            value = _parse_values(raw, key, lineno)
        elif key == "output":
            value = raw
        else:
            value = _parse_float(raw, key, lineno)

        if key in _POSITIVE and not (value > 0.0):
            raise ConfigError(f"{key} must be > 0, got {value}",
                              line=lineno, field=key)
        if key in _NONNEGATIVE and value < 0.0:
            raise ConfigError(f"{key} must be >= 0, got {value}",
                              line=lineno, field=key)
        if key == "level_ratio" and not (0.0 < value < 1.0):
            raise ConfigError(f"level_ratio must lie in (0, 1), got {value}",
                              line=lineno, field=key)
        if key == "samples" and value < 2:
            raise ConfigError(f"samples must be >= 2, got {value}",
                              line=lineno, field=key)
        if key == "extend_factor" and value < 1.0:
            raise ConfigError(f"extend_factor must be >= 1, got {value}",
                              line=lineno, field=key)
        seen[key] = value

    missing = [k for k in REQUIRED_KEYS if k not in seen]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    cfg = RunConfig(**seen)
    # cross-field validation mirrors the domain constructors but reports
    # in config terms
    try:
        cfg.protocol_spec()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


# ---------------------------------------------------------------------------
# writers

def summary_mapping(cfg_like: dict, report: ChargeReport,
                    traj: Trajectory) -> dict:
    """Assemble the summary document fields for one run."""
    d = traj.diagnostics
    return {
        "protocol": cfg_like["protocol"],
        "family": cfg_like["family"],
        "omega0_tau_c": fmt(cfg_like["omega0_tau_c"]),
        "gamma_minus": fmt(cfg_like["gamma_minus"]),
        "gamma_z": fmt(cfg_like["gamma_z"]),
        "W_norm_final": fmt(report.w_norm),
        "P_avg": fmt(report.p_avg),
        "p1_final": fmt(report.populations[0]),
        "p2_final": fmt(report.populations[1]),
        "p3_final": fmt(report.populations[2]),
        "max_norm_drift": fmt(d.max_norm_drift),
        "max_trace_drift": fmt(d.max_trace_drift),
    }


def format_summary(mapping: dict) -> str:
    return "".join(f"{k}: {mapping[k]}\n" for k in SUMMARY_FIELDS)


def parse_summary(text: str) -> dict:
    """Read back a summary document into a string-keyed dict."""
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, raw = line.partition(":")
        out[key.strip()] = raw.strip()
    return out


def summary_path_for(path: str) -> str:
    root, _ = os.path.splitext(path)
    return root + ".summary"


def write_trajectory(traj: Trajectory, report: ChargeReport, path: str,
                     run_meta: dict) -> str:
    """Write the sampled trajectory as CSV plus a sibling summary.

    ``run_meta`` must carry protocol, family, omega0_tau_c, gamma_minus,
    gamma_z, level_ratio, and omega0.  Returns the summary path.
    """
    r = run_meta["level_ratio"]
    omega0 = run_meta.get("omega0", 1.0)
    w = energy_series(traj, r)
    if traj.times.size >= 3:
        p_inst = instantaneous_power(traj, r)
    else:
        p_inst = np.zeros_like(w)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(TRAJECTORY_HEADER + "\n")
            for k, t in enumerate(traj.times):
                p = traj.populations[k]
                fh.write(",".join((fmt(t), fmt(omega0 * t), fmt(p[0]),
                                   fmt(p[1]), fmt(p[2]), fmt(w[k]),
                                   fmt(p_inst[k]))) + "\n")
        spath = summary_path_for(path)
        with open(spath, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_summary(summary_mapping(run_meta, report, traj)))
    except OSError as exc:
        raise OSError(f"cannot write trajectory to {path}: {exc}") from exc
    return spath


def read_trajectory(path: str) -> dict:
    """Parse a trajectory CSV back into named float columns."""
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    data = np.array([[float(x) for x in row] for row in rows[1:]])
    return {name: data[:, i] for i, name in enumerate(header)}


_SWEEP_COLUMNS = ("w_norm", "p3", "p_avg", "p_avg_p3", "p1", "p2",
                  "norm_drift", "trace_drift", "min_eigenvalue", "n_steps",
                  "ok", "error")


def sweep_header() -> list:
    cols = ["value"]
    for proto in ("sta", "stirap"):
        cols.extend(f"{proto}_{c}" for c in _SWEEP_COLUMNS)
    return cols


def write_sweep(result: SweepResult, path: str) -> None:
    """Write sweep rows (both protocols per row) as CSV."""

    def cells(res):
        return [fmt(res.w_norm), fmt(res.p3), fmt(res.p_avg),
                fmt(res.p_avg_p3), fmt(res.p1), fmt(res.p2),
                fmt(res.max_norm_drift), fmt(res.max_trace_drift),
                fmt(res.min_eigenvalue), str(res.n_steps),
                "1" if res.ok else "0", res.error or ""]

    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(sweep_header())
            for row in result.rows:
                writer.writerow([fmt(row.value)] + cells(row.sta)
                                + cells(row.stirap))
    except OSError as exc:
        raise OSError(f"cannot write sweep to {path}: {exc}") from exc


def read_sweep(path: str) -> list:
    """Parse a sweep CSV into a list of dict rows (numbers as floats)."""
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    out = []
    for raw in rows[1:]:
        row = {}
        for name, cell in zip(header, raw):
            if name.endswith("_error"):
                row[name] = cell
            elif cell == "":
                row[name] = math.nan
            else:
                row[name] = float(cell)
        out.append(row)
    return out


def write_pulse_table(pulse: PulseSpec, grid, path: str) -> None:
    """Tabulate the drive, assistant, and frame-rotated pulse strengths."""
    from . import pulses as pl
    from .errors import DegeneracyError

    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(PULSE_HEADER + "\n")
            for t in np.asarray(grid, dtype=float):
                o1, o2 = pl.eval_pair(pulse, t)
                oa = pl.eval_cd_analytic(pulse, t)
                try:
                    o1t, o2t, _ = pl.modified_pulses(pulse, t)
                except DegeneracyError:
                    o1t, o2t = math.nan, math.nan
                fh.write(",".join((fmt(t), fmt(pulse.omega0 * t), fmt(o1),
                                   fmt(o2), fmt(oa), fmt(o1t), fmt(o2t)))
                         + "\n")
    except OSError as exc:
        raise OSError(f"cannot write pulse table to {path}: {exc}") from exc
