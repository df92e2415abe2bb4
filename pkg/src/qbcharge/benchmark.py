"""Benchmark the compiled kernel against the pure-Python path.

Run as ``python -m qbcharge.benchmark``.  Times a representative set of
closed- and open-system runs on both backends and reports the speedup
together with the worst population disagreement, which doubles as a
quick parity check.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ._backend import compiled_available
from .hamiltonian import ProtocolSpec
from .propagator import (DecoherenceSpec, propagate_lindblad_protocol,
                         propagate_pure_protocol)
from .pulses import PulseSpec


def _workloads():
    g72 = PulseSpec("gaussian", tau_c=7.2)
    g50 = PulseSpec("gaussian", tau_c=50.0)
    psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    rho0 = np.diag([1.0, 0.0, 0.0]).astype(complex)

    def pure(spec, samples):
        grid = np.linspace(0.0, spec.pulse.tau_c, samples)

        def run(backend):
            return propagate_pure_protocol(spec, psi0, grid, backend=backend)

        return run

    def lind(spec, dec, samples):
        grid = np.linspace(0.0, spec.pulse.tau_c, samples)

        def run(backend):
            return propagate_lindblad_protocol(spec, rho0, dec, grid,
                                               backend=backend)

        return run

    return [
        ("pure STA 7.2 (1000 pts)", pure(ProtocolSpec("sta", g72), 1000)),
        ("pure STIRAP 50 (1000 pts)", pure(ProtocolSpec("stirap", g50), 1000)),
        ("pure rotated 7.2 (1000 pts)",
         pure(ProtocolSpec("sta_rotated", g72), 1000)),
        ("lindblad STA 7.2 g-=0.001 (500 pts)",
         lind(ProtocolSpec("sta", g72), DecoherenceSpec(gamma_minus=1e-3), 500)),
        ("lindblad STIRAP 50 g-=0.01 (500 pts)",
         lind(ProtocolSpec("stirap", g50), DecoherenceSpec(gamma_minus=1e-2),
              500)),
    ]


def _best_time(run, backend, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        run(backend)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m qbcharge.benchmark",
        description="compare the compiled kernel with the pure-Python path")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repetitions per backend (best-of)")
    args = parser.parse_args(argv)

    if not compiled_available():
        print("compiled kernel not built; timing the Python path only")

    name_w = max(len(name) for name, _ in _workloads())
    header = (f"{'workload':<{name_w}}  {'compiled':>10}  {'python':>10}  "
              f"{'speedup':>8}  {'max |dp|':>9}")
    print(header)
    print("-" * len(header))
    for name, run in _workloads():
        t_py = _best_time(run, "python", max(1, args.repeats // 3 or 1))
        if compiled_available():
            t_c = _best_time(run, "compiled", args.repeats)
            pops_c = run("compiled").populations
            pops_p = run("python").populations
            dp = float(np.max(np.abs(pops_c - pops_p)))
            print(f"{name:<{name_w}}  {t_c * 1e3:>8.2f}ms  "
                  f"{t_py * 1e3:>8.1f}ms  {t_py / t_c:>7.0f}x  {dp:>9.2e}")
        else:
            print(f"{name:<{name_w}}  {'-':>10}  {t_py * 1e3:>8.1f}ms")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
