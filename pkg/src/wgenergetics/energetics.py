"""Energy ledgers, locally extractable work and the classical ergotropy bound witness."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .coherent import BlochTrajectory, cumulative_flows
from .core import Statistics, TimeGrid, bloch_ergotropy
from .errors import DomainError, InconsistencyError
from .single_photon import SingleExcitationTrajectory, single_photon_energetics

TOL_BALANCE_REF = 1e-6
DT_REF = 1e-3
TOL_WITNESS = 1e-6

Trajectory = Union[BlochTrajectory, SingleExcitationTrajectory]


def tol_balance(dt: float) -> float:
    """Balance tolerance, ``1e-6`` at ``dt = 1e-3`` and scaled as ``dt^4``."""
    return TOL_BALANCE_REF * (dt / DT_REF) ** 4


@dataclass(frozen=True)
class EnergyLedger:
    """Time series of qubit energy, work, correlation energy and extractable work.

    ``dWB`` is the extra work Bob can extract by local operations compared
    with ``t0``: qubit ergotropy plus the field's coherent-component energy.
    """

    grid: TimeGrid
    U_q: np.ndarray
    W: np.ndarray
    Q: np.ndarray
    E_q: np.ndarray
    E_f_coh: np.ndarray
    dWB: np.ndarray
    balance_residual: float
    statistics: Statistics

    @property
    def times(self):
        return self.grid.times

    @property
    def dE_q(self):
        return self.E_q - self.E_q[0]

    def extractable_work(self):
        """``W_B(t)``: qubit ergotropy plus coherent field energy."""
        return self.E_q + self.E_f_coh


def coherent_field_energy_series(traj: Trajectory) -> np.ndarray:
    if isinstance(traj, SingleExcitationTrajectory):
        return np.zeros(len(traj.times))
    _, _, energy_in, energy_out = cumulative_flows(traj)
    tail = traj.pulse.energy_between(traj.grid.t_max, np.inf)
    return energy_out + (energy_in[-1] + tail - energy_in)


def coherent_field_energy(traj: Trajectory, t: float) -> float:
    """Energy of the field's coherent component at time ``t`` (linear interpolation off-grid)."""
    times = traj.times
    if not times[0] - 1e-12 <= t <= times[-1] + 1e-12:
        raise DomainError(f"t={t} lies outside the trajectory grid")
    return float(np.interp(t, times, coherent_field_energy_series(traj)))


def assemble_ledger(traj: Trajectory, check: bool = True) -> EnergyLedger:
    """Build the energy ledger of a solved scenario and verify its invariants."""
    grid = traj.grid
    if isinstance(traj, BlochTrajectory):
        W, Q, _, _ = cumulative_flows(traj)
        U_q = traj.excited_population
        E_q = bloch_ergotropy(traj.x, traj.y, traj.z)
        statistics = Statistics.COHERENT
    elif isinstance(traj, SingleExcitationTrajectory):
        W, Q = single_photon_energetics(traj)
        U_q = traj.excited_population
        E_q = np.maximum(traj.z, 0.0)
        statistics = Statistics.SINGLE_PHOTON
    else:
        raise DomainError(f"unsupported trajectory type {type(traj).__name__}")
    if len(U_q) != grid.n_steps + 1:
        raise DomainError("trajectory does not match its grid")
    E_f = coherent_field_energy_series(traj)
    dWB = (E_q - E_q[0]) - W
    residual = float(np.max(np.abs(U_q - U_q[0] - W - Q)))
    ledger = EnergyLedger(grid, U_q, W, Q, E_q, E_f, dWB, residual, statistics)
    if check:
        verify_ledger(ledger)
    return ledger


def verify_ledger(ledger: EnergyLedger):
    tol = tol_balance(ledger.grid.dt)
    if ledger.balance_residual > 100.0 * tol:
        raise InconsistencyError(
            f"energy balance residual {ledger.balance_residual:.3g} exceeds {100 * tol:.3g}"
        )
    if np.any(ledger.E_q > ledger.U_q + 1e-9):
        raise InconsistencyError("ergotropy exceeds energy")
    drift = np.max(np.abs(ledger.W + (ledger.E_f_coh - ledger.E_f_coh[0])))
    if ledger.statistics is Statistics.COHERENT and drift > 100.0 * tol:
        raise InconsistencyError(f"work and coherent field energy disagree by {drift:.3g}")


def energy_balance_residual(ledger: EnergyLedger) -> float:
    """``max_t |dU_q(t) - W(t) - Q(t)|``, recomputed from the stored series."""
    return float(np.max(np.abs(ledger.U_q - ledger.U_q[0] - ledger.W - ledger.Q)))


@dataclass(frozen=True)
class BoundWitness:
    min_gap: float
    violation: bool
    violation_times: np.ndarray


def classical_bound_witness(ledger: EnergyLedger, tol: float = TOL_WITNESS) -> BoundWitness:
    """Test ``W(t) >= dE_q(t)``, which every coherent drive must satisfy."""
    gap = ledger.W - ledger.dE_q
    bad = gap < -tol
    return BoundWitness(float(gap.min()), bool(bad.any()), ledger.times[bad])
