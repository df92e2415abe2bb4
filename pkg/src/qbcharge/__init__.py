"""Fast and stable charging of a three-level quantum battery.

Simulates population transfer into the top battery level by bare
two-pulse adiabatic passage and by its counter-diabatically assisted
shortcut, in closed and open (master-equation) dynamics, and provides
the sweep harness behind the stored-energy / charging-power comparison
curves.
"""

from ._backend import active_backend, compiled_available
from .errors import (ConfigError, DegeneracyError, DivergenceError,
                     GaugeTrackingError, IntegrationError, QBChargeError,
                     StiffnessError, TraceDriftError)
from .experiments import (CdConsistencyReport, SweepResult, SweepRow,
                          SweepSpec, default_gamma_grid, default_tau_grid,
                          run_protocol, sweep_gamma, sweep_tau,
                          verify_cd_consistency)
from .hamiltonian import (Eigenstructure, ProtocolSpec, bare_h0,
                          build_rotated_sta, build_sta, build_stirap,
                          eigenstructure, hamiltonian_fn, rotation_frame_u)
from .metrics import (ChargeReport, avg_power, charge_report, energy_series,
                      instantaneous_power, state_populations, stored_energy)
from .propagator import (DecoherenceSpec, Trajectory, ground_state,
                         lindblad_rhs, propagate_lindblad,
                         propagate_lindblad_protocol, propagate_pure,
                         propagate_pure_protocol)
from .pulses import (PulseSpec, eval_cd_analytic, eval_cd_from_derivatives,
                     eval_pair, eval_pair_derivatives, max_cd_amplitude,
                     mixing_angle, modified_pulses)

__version__ = "1.0.0"

__all__ = [
    "ChargeReport", "CdConsistencyReport", "ConfigError", "DecoherenceSpec",
    "DegeneracyError", "DivergenceError", "Eigenstructure",
    "GaugeTrackingError", "IntegrationError", "ProtocolSpec", "PulseSpec",
    "QBChargeError", "StiffnessError", "SweepResult", "SweepRow", "SweepSpec",
    "TraceDriftError", "Trajectory", "active_backend", "avg_power",
    "bare_h0", "build_rotated_sta", "build_sta", "build_stirap",
    "charge_report", "compiled_available", "default_gamma_grid",
    "default_tau_grid", "eigenstructure", "energy_series", "eval_cd_analytic",
    "eval_cd_from_derivatives", "eval_pair", "eval_pair_derivatives",
    "ground_state", "hamiltonian_fn", "instantaneous_power", "lindblad_rhs",
    "max_cd_amplitude", "mixing_angle", "modified_pulses",
    "propagate_lindblad", "propagate_lindblad_protocol", "propagate_pure",
    "propagate_pure_protocol", "rotation_frame_u", "run_protocol",
    "state_populations", "stored_energy", "sweep_gamma", "sweep_tau",
    "verify_cd_consistency",
]
