"""Ground-state qubit scattering a resonant single-photon wavepacket.

In the one-excitation sector the joint state is
``e(t)|e, vac> + |g> (x) (one photon with wavefunction ...)`` and the excited
amplitude obeys ``de/dt = -(gamma/2) e + sqrt(gamma) xi(t)`` with
``e(t0) = 0``. The outgoing photon wavefunction is ``xi - sqrt(gamma) e``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (BLOCH_TOL, Pulse, QubitState, Statistics, StepSamples, TimeGrid,
                   binary_entropy, cumulative_hermite, evaluate_envelope, sample_steps)
from .errors import DomainError


@dataclass(frozen=True)
class SingleExcitationTrajectory:
    grid: TimeGrid
    e_amp: np.ndarray
    input_envelope: np.ndarray
    output_envelope: np.ndarray
    gamma: float
    pulse: Pulse
    samples: StepSamples

    @property
    def times(self):
        return self.grid.times

    @property
    def excited_population(self):
        return np.abs(self.e_amp) ** 2

    @property
    def z(self):
        return 2.0 * self.excited_population - 1.0

    @property
    def sigma_minus(self):
        # the reduced qubit state stays diagonal
        return np.zeros(len(self.e_amp), dtype=complex)

    def entropy(self):
        """Qubit entanglement entropy (nats); the joint state is pure."""
        return binary_entropy(self.excited_population)

    def state(self, i: int) -> QubitState:
        return qubit_state_from_amplitude(self.e_amp[i])


def qubit_state_from_amplitude(e: complex) -> QubitState:
    """Reduced qubit state for excited amplitude ``e``: diagonal, ``z = 2|e|^2 - 1``."""
    pe = abs(e) ** 2
    if abs(e) > 1.0 + BLOCH_TOL:
        raise DomainError(f"|e| = {abs(e)} exceeds 1")
    return QubitState(0.0, 0.0, min(2.0 * pe - 1.0, 1.0))


def integrate_single_excitation(pulse: Pulse, grid: TimeGrid, gamma: float = 1.0) -> SingleExcitationTrajectory:
    """RK4 solution of the excited amplitude; the qubit starts in ``|g>``."""
    if pulse.statistics is not Statistics.SINGLE_PHOTON:
        raise DomainError("integrate_single_excitation needs a single-photon pulse")
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    smp = sample_steps(pulse, grid)
    sg = math.sqrt(gamma)
    h = grid.dt
    lam = -0.5 * gamma
    n = grid.n_steps
    e_out = np.empty(n + 1, dtype=complex)
    e = 0.0 + 0.0j
    e_out[0] = e
    x0, xm, x1 = smp.start.tolist(), smp.mid.tolist(), smp.end.tolist()
    for i in range(n):
        k1 = lam * e + sg * x0[i]
        k2 = lam * (e + 0.5 * h * k1) + sg * xm[i]
        k3 = lam * (e + 0.5 * h * k2) + sg * xm[i]
        k4 = lam * (e + h * k3) + sg * x1[i]
        e = e + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        e_out[i + 1] = e
    xi = evaluate_envelope(pulse, grid.times)
    return SingleExcitationTrajectory(grid, e_out, xi, xi - sg * e_out, gamma, pulse, smp)


def photon_fluxes(traj: SingleExcitationTrajectory):
    """Cumulative absorbed-from-input and emitted-to-output photon numbers on the grid."""
    g = traj.gamma
    sg = math.sqrt(g)
    smp = traj.samples
    e_a, e_b = traj.e_amp[:-1], traj.e_amp[1:]
    de_a = -0.5 * g * e_a + sg * smp.start
    de_b = -0.5 * g * e_b + sg * smp.end

    def intensity(f, df):
        return np.abs(f) ** 2, 2.0 * (np.conj(f) * df).real

    ia, dia = intensity(smp.start, smp.dstart)
    ib, dib = intensity(smp.end, smp.dend)
    oa, doa = intensity(smp.start - sg * e_a, smp.dstart - sg * de_a)
    ob, dob = intensity(smp.end - sg * e_b, smp.dend - sg * de_b)
    dt = traj.grid.dt
    return (cumulative_hermite(ia, ib, dia, dib, dt),
            cumulative_hermite(oa, ob, doa, dob, dt))


def excitation_budget(traj: SingleExcitationTrajectory):
    """``P_e(t) + emitted(t) + still-incoming(t)``; constant, equal to the pulse norm."""
    absorbed, emitted = photon_fluxes(traj)
    tail = traj.pulse.energy_between(traj.grid.t_max, np.inf)
    incoming = absorbed[-1] + tail - absorbed
    return traj.excited_population + emitted + incoming


def single_photon_energetics(traj: SingleExcitationTrajectory):
    """Cumulative work and correlation energy for a single-photon drive.

    The pulse has no coherent component, so no work is exchanged. All energy
    entering the qubit is correlation energy, obtained from the net photon
    flux ``|xi|^2 - |xi_out|^2``.
    """
    absorbed, emitted = photon_fluxes(traj)
    return np.zeros(len(traj.e_amp)), absorbed - emitted
