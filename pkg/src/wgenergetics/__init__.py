"""Work, correlation energy and ergotropy of a qubit driven through a 1D waveguide."""
from .core import (Pulse, QubitState, Statistics, TimeGrid, Units, ergotropy, evaluate_envelope,
                   gaussian, normalize_pulse, qubit_energy, rising_exponential, square, vacuum)
from .coherent import (BlochTrajectory, coherent_energy_flows, field_side_work, integrate_obe)
from .single_photon import (SingleExcitationTrajectory, integrate_single_excitation,
                            qubit_state_from_amplitude, single_photon_energetics)
from .energetics import (EnergyLedger, assemble_ledger, classical_bound_witness,
                         coherent_field_energy, energy_balance_residual)
from .runner import (ScenarioConfig, convergence_sweep, emit_fig2_dataset, fig2_configs,
                     parse_config, run_scenario, serialize_config)

__version__ = "0.1.0"
