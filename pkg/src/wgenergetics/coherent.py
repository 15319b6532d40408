"""Optical Bloch equations for a qubit driven by a resonant coherent pulse.

In the rotating frame, with ``beta(t)`` the mean input amplitude and
``s = <sigma_->``::

    ds/dt = -(gamma/2) s - sqrt(gamma) beta z
    dz/dt = -gamma (1 + z) + 4 sqrt(gamma) Re[conj(beta) s]

and the output field is ``beta_out = beta - sqrt(gamma) s``. The signs follow
from the coupling ``i sqrt(gamma) (sigma_+ a - a^dag sigma_-)``; the energy
balance tests pin them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (BLOCH_TOL, Pulse, QubitState, Statistics, StepSamples, TimeGrid,
                   cumulative_hermite, evaluate_envelope, sample_steps)
from .errors import DomainError, SolverDivergenceError


def obe_rhs(s, z, beta, gamma):
    sg = math.sqrt(gamma)
    ds = -0.5 * gamma * s - sg * beta * z
    dz = -gamma * (1.0 + z) + 4.0 * sg * (beta.conjugate() * s).real
    return ds, dz


@dataclass(frozen=True)
class BlochTrajectory:
    grid: TimeGrid
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    input_amplitude: np.ndarray
    output_amplitude: np.ndarray
    gamma: float
    pulse: Pulse
    samples: StepSamples

    @property
    def times(self):
        return self.grid.times

    @property
    def sigma_minus(self):
        return 0.5 * (self.x - 1j * self.y)

    @property
    def excited_population(self):
        return 0.5 * (1.0 + self.z)

    def state(self, i: int) -> QubitState:
        return QubitState(float(self.x[i]), float(self.y[i]), float(self.z[i]))

    def drive_strength(self):
        """``|beta|^2 / gamma`` along the trajectory; >> 1 is the classical-field regime."""
        return np.abs(self.input_amplitude) ** 2 / self.gamma


def integrate_obe(pulse: Pulse, s0: QubitState, grid: TimeGrid, gamma: float = 1.0) -> BlochTrajectory:
    """Fixed-step RK4 integration of the optical Bloch equations.

    The envelope is sampled at the RK4 stage times from inside each step, so
    pulses that switch on or off at a grid node are integrated without
    spurious kicks.
    """
    if pulse.statistics is not Statistics.COHERENT:
        raise DomainError("integrate_obe needs a coherent pulse")
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    samples = sample_steps(pulse, grid)
    n = grid.n_steps
    h = grid.dt
    s_out = np.empty(n + 1, dtype=complex)
    z_out = np.empty(n + 1)
    s, z = s0.sigma_minus, s0.z
    s_out[0], z_out[0] = s, z
    b0, bm, b1 = samples.start.tolist(), samples.mid.tolist(), samples.end.tolist()
    for i in range(n):
        k1s, k1z = obe_rhs(s, z, b0[i], gamma)
        k2s, k2z = obe_rhs(s + 0.5 * h * k1s, z + 0.5 * h * k1z, bm[i], gamma)
        k3s, k3z = obe_rhs(s + 0.5 * h * k2s, z + 0.5 * h * k2z, bm[i], gamma)
        k4s, k4z = obe_rhs(s + h * k3s, z + h * k3z, b1[i], gamma)
        s = s + h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
        z = z + h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
        r = math.sqrt(4.0 * abs(s) ** 2 + z * z)
        if r > 1.0:
            if r > 1.0 + BLOCH_TOL:
                raise SolverDivergenceError(
                    f"Bloch vector norm {r:.12g} at t={grid.t0 + (i + 1) * h:.6g}; "
                    f"try a smaller dt than {h}"
                )
            s, z = s / r, z / r
        s_out[i + 1], z_out[i + 1] = s, z
    beta = evaluate_envelope(pulse, grid.times)
    return BlochTrajectory(
        grid=grid,
        x=2.0 * s_out.real,
        y=-2.0 * s_out.imag,
        z=z_out,
        input_amplitude=beta,
        output_amplitude=beta - math.sqrt(gamma) * s_out,
        gamma=gamma,
        pulse=pulse,
        samples=samples,
    )


def coherent_energy_flows(traj: BlochTrajectory):
    """Pointwise work flow and correlation-energy flow (hbar*omega0 units per time)."""
    g = traj.gamma
    s = traj.sigma_minus
    beta = traj.input_amplitude
    w_dot = 2.0 * math.sqrt(g) * (s * beta.conj()).real - g * np.abs(s) ** 2
    q_dot = g * (np.abs(s) ** 2 - traj.excited_population)
    return w_dot, q_dot


def field_side_work(traj: BlochTrajectory):
    """Work flow read off the field: drop in coherent-component intensity."""
    return -(np.abs(traj.output_amplitude) ** 2 - np.abs(traj.input_amplitude) ** 2)


@dataclass(frozen=True)
class _StepEnds:
    s_a: np.ndarray
    s_b: np.ndarray
    z_a: np.ndarray
    z_b: np.ndarray
    ds_a: np.ndarray
    ds_b: np.ndarray
    dz_a: np.ndarray
    dz_b: np.ndarray
    beta_a: np.ndarray
    beta_b: np.ndarray
    dbeta_a: np.ndarray
    dbeta_b: np.ndarray


def _step_ends(traj: BlochTrajectory) -> _StepEnds:
    s = traj.sigma_minus
    z = traj.z
    smp = traj.samples
    ds_a, dz_a = obe_rhs(s[:-1], z[:-1], smp.start, traj.gamma)
    ds_b, dz_b = obe_rhs(s[1:], z[1:], smp.end, traj.gamma)
    return _StepEnds(s[:-1], s[1:], z[:-1], z[1:], ds_a, ds_b, dz_a, dz_b,
                     smp.start, smp.end, smp.dstart, smp.dend)


def cumulative_flows(traj: BlochTrajectory):
    """Cumulative ``W(t)``, ``Q(t)``, input and output coherent energies on the grid.

    Integrals use the endpoint-corrected trapezoidal rule with one-sided
    envelope values, so the result is fourth order in ``dt`` like the solver.
    """
    g = traj.gamma
    sg = math.sqrt(g)
    e = _step_ends(traj)
    dt = traj.grid.dt

    def w_dot(s, b):
        return 2.0 * sg * (s * np.conj(b)).real - g * np.abs(s) ** 2

    def w_ddot(s, ds, b, db):
        return 2.0 * sg * (np.conj(db) * s + np.conj(b) * ds).real - 2.0 * g * (np.conj(s) * ds).real

    def q_dot(s, z):
        return g * (np.abs(s) ** 2 - 0.5 * (1.0 + z))

    def q_ddot(s, ds, dz):
        return g * (2.0 * (np.conj(s) * ds).real - 0.5 * dz)

    work = cumulative_hermite(w_dot(e.s_a, e.beta_a), w_dot(e.s_b, e.beta_b),
                              w_ddot(e.s_a, e.ds_a, e.beta_a, e.dbeta_a),
                              w_ddot(e.s_b, e.ds_b, e.beta_b, e.dbeta_b), dt)
    corr = cumulative_hermite(q_dot(e.s_a, e.z_a), q_dot(e.s_b, e.z_b),
                              q_ddot(e.s_a, e.ds_a, e.dz_a), q_ddot(e.s_b, e.ds_b, e.dz_b), dt)

    def intensity(b, db):
        return np.abs(b) ** 2, 2.0 * (np.conj(b) * db).real

    ia, dia = intensity(e.beta_a, e.dbeta_a)
    ib, dib = intensity(e.beta_b, e.dbeta_b)
    energy_in = cumulative_hermite(ia, ib, dia, dib, dt)
    oa, doa = intensity(e.beta_a - sg * e.s_a, e.dbeta_a - sg * e.ds_a)
    ob, dob = intensity(e.beta_b - sg * e.s_b, e.dbeta_b - sg * e.ds_b)
    energy_out = cumulative_hermite(oa, ob, doa, dob, dt)
    return work, corr, energy_in, energy_out
