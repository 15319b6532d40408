"""Brute-force time-bin (collision) model of the qubit-waveguide system.

The waveguide is cut into bins of duration ``dt``; bin ``k`` carries the
mode ``b_k = (1/sqrt(dt)) int_bin a(tau) dtau`` and meets the qubit exactly
once through

    U = exp[ sqrt(gamma dt) (sigma_+ b - sigma_- b^dag) ].

Three exact strategies are provided:

* a traced two-body stepper for coherent input (each fresh bin is
  uncorrelated with the qubit before its collision, so tracing is exact);
* the global pure state in the one-excitation sector for single photons;
* a full joint state vector over a handful of bins, for cross-checks.

Basis conventions: qubit ``(|g>, |e>)``; joint space ``qubit (x) bin``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from .core import (Pulse, QubitState, Statistics, binary_entropy, check_support_alignment)
from .errors import DomainError, NumericalError, TruncationError

SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.T.copy()
QUBIT_ENERGY = np.diag([0.0, 1.0]).astype(complex)

STATE_TOL = 1e-10
POSITIVITY_TOL = 1e-9
MAX_FULL_DIM = 2**25
MAX_FULL_BINS = 14


def lowering(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), 1).astype(complex)


def number_op(n_max: int) -> np.ndarray:
    return np.diag(np.arange(n_max + 1)).astype(complex)


def coupling_generator(dt: float, n_max: int, gamma: float = 1.0) -> np.ndarray:
    """Anti-Hermitian per-collision generator ``sqrt(gamma dt)(sigma_+ b - sigma_- b^dag)``."""
    b = lowering(n_max)
    return math.sqrt(gamma * dt) * (np.kron(SIGMA_PLUS, b) - np.kron(SIGMA_MINUS, b.conj().T))


def coupling_hamiltonian(dt: float, n_max: int, gamma: float = 1.0) -> np.ndarray:
    """Interaction Hamiltonian during one collision (hbar = 1), ``U = exp(-i V dt)``."""
    return 1j * coupling_generator(dt, n_max, gamma) / dt


def collision_unitary(dt: float, n_max: int, gamma: float = 1.0) -> np.ndarray:
    """Exact exponential of the collision generator via Hermitian eigendecomposition."""
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    if not dt > 0:
        raise DomainError("dt must be positive")
    k = 1j * coupling_generator(dt, n_max, gamma)
    k = 0.5 * (k + k.conj().T)
    w, v = np.linalg.eigh(k)
    return (v * np.exp(-1j * w)) @ v.conj().T


def choose_n_max(mean_photons: float, tail: float = 1e-8) -> int:
    """Smallest cutoff whose Poisson tail beyond it is below ``tail`` (at least 1)."""
    n = 1
    while stats.poisson.sf(n, mean_photons) >= tail:
        n += 1
    return n


def coherent_bin_state(alpha: complex, n_max: int) -> np.ndarray:
    """Fock-truncated coherent state, renormalised."""
    vec = np.zeros(n_max + 1, dtype=complex)
    vec[0] = 1.0
    for k in range(1, n_max + 1):
        vec[k] = vec[k - 1] * alpha / math.sqrt(k)
    return vec / np.linalg.norm(vec)


def partial_traces(joint: np.ndarray, d: int):
    """Return (qubit marginal, bin marginal) of a ``2d x 2d`` joint density matrix."""
    r = joint.reshape(2, d, 2, d)
    return np.einsum("iaja->ij", r), np.einsum("iaib->ab", r)


def check_density(rho: np.ndarray, what: str = "state"):
    tr = np.trace(rho)
    if abs(tr - 1.0) > STATE_TOL:
        raise NumericalError(f"{what}: trace {tr} differs from 1")
    if np.max(np.abs(rho - rho.conj().T)) > STATE_TOL:
        raise NumericalError(f"{what}: not Hermitian")
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lam < -POSITIVITY_TOL:
        raise TruncationError(f"{what}: negative eigenvalue {lam:.3g}; raise n_max")
    return lam


# -- time bins --------------------------------------------------------------


@dataclass(frozen=True)
class TimeBins:
    """Discretised input field: one complex amplitude per bin.

    Coherent: ``alpha_k = beta(t_k) sqrt(dt)``. Single photon: one-photon
    amplitudes ``xi(t_k) sqrt(dt)``. ``t_k`` are bin midpoints.
    """

    t0: float
    dt: float
    amplitudes: np.ndarray
    statistics: Statistics

    @property
    def n_bins(self) -> int:
        return len(self.amplitudes)

    @property
    def edges(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_bins + 1)

    @property
    def mids(self) -> np.ndarray:
        return self.t0 + self.dt * (np.arange(self.n_bins) + 0.5)

    @property
    def envelope(self) -> np.ndarray:
        return self.amplitudes / math.sqrt(self.dt)


def build_time_bins(pulse: Pulse, dt: float, t0: Optional[float] = None,
                    t_max: Optional[float] = None) -> TimeBins:
    """Sample the pulse on bins of width ``dt`` covering ``[t0, t_max]``.

    The window defaults to the pulse support. Single-photon weights are
    rescaled so their squared sum equals the continuum photon number.
    """
    if not dt > 0:
        raise DomainError("dt must be positive")
    t0 = pulse.t_start if t0 is None else t0
    t_max = pulse.t_stop if t_max is None else t_max
    if not (np.isfinite(t0) and np.isfinite(t_max)) or not t_max > t0:
        raise DomainError("time-bin window must be finite and non-empty")
    n = (t_max - t0) / dt
    if abs(n - round(n)) > 1e-6 * max(1.0, n):
        raise DomainError(f"dt={dt} does not divide the window [{t0}, {t_max}]")
    check_support_alignment(pulse, t0, t_max, dt)
    n = int(round(n))
    mids = t0 + dt * (np.arange(n) + 0.5)
    active = (mids >= pulse.t_start) & (mids <= pulse.t_stop)
    amps = np.zeros(n, dtype=complex)
    if active.any():
        amps[active] = pulse.raw(mids[active]) * math.sqrt(dt)
    if pulse.statistics is Statistics.SINGLE_PHOTON:
        total = float(np.sum(np.abs(amps) ** 2))
        if total > 0:
            amps *= math.sqrt(pulse.energy_between(t0, t_max) / total)
    return TimeBins(float(t0), float(dt), amps, pulse.statistics)


# -- two-body stepper ---------------------------------------------------------


@dataclass(frozen=True)
class CollisionStepState:
    rho_q: np.ndarray
    rho_bin: np.ndarray
    joint_pre: np.ndarray
    joint_post: np.ndarray
    rho_q_post: np.ndarray
    in_amplitude: complex
    out_amplitude: complex
    out_photons: float
    min_eigenvalue: float


def step_collision_coherent(rho_q: np.ndarray, alpha: complex, unitary: np.ndarray,
                            dt: float) -> CollisionStepState:
    """Collide the qubit with one fresh coherent bin and trace the bin out."""
    d = unitary.shape[0] // 2
    n_max = d - 1
    psi = coherent_bin_state(alpha, n_max)
    rho_bin = np.outer(psi, psi.conj())
    joint_pre = np.kron(rho_q, rho_bin)
    joint_post = unitary @ joint_pre @ unitary.conj().T
    lam = check_density(joint_post, "post-collision state")
    q_post, f_post = partial_traces(joint_post, d)
    b = lowering(n_max)
    out_amp = complex(np.trace(b @ f_post)) / math.sqrt(dt)
    out_n = float(np.trace(number_op(n_max) @ f_post).real)
    in_amp = complex(np.trace(b @ rho_bin)) / math.sqrt(dt)
    return CollisionStepState(rho_q, rho_bin, joint_pre, joint_post, q_post,
                              in_amp, out_amp, out_n, lam)


@dataclass(frozen=True)
class FlowDecomposition:
    W_q: float
    Q_q: float
    W_f: float
    Q_f: float
    mean_coupling: float

    @property
    def action_reaction(self) -> float:
        return self.W_q + self.W_f


def decompose_energy_flows(joint_pre: np.ndarray, joint_post: np.ndarray,
                           coupling: np.ndarray) -> FlowDecomposition:
    """Split each party's energy flow into work and correlation parts.

    Evaluated on the average of the pre- and post-collision joint states.
    Work is generated by the mean-field drive each party exerts on the other;
    the correlation part comes from the connected part ``chi`` of the state.
    """
    d = joint_pre.shape[0] // 2
    rho = 0.5 * (joint_pre + joint_post)
    rho_q, rho_f = partial_traces(rho, d)
    chi = rho - np.kron(rho_q, rho_f)
    v4 = coupling.reshape(2, d, 2, d)
    drive_q = np.einsum("iajb,ba->ij", v4, rho_f)
    drive_f = np.einsum("iajb,ji->ab", v4, rho_q)
    h_f = number_op(d - 1)

    def comm(a, b):
        return a @ b - b @ a

    w_q = (-1j * np.trace(comm(QUBIT_ENERGY, drive_q) @ rho_q)).real
    w_f = (-1j * np.trace(comm(h_f, drive_f) @ rho_f)).real
    hq_full = np.kron(QUBIT_ENERGY, np.eye(d))
    hf_full = np.kron(np.eye(2), h_f)
    vc = comm(coupling, chi)
    q_q = (-1j * np.trace(hq_full @ vc)).real
    q_f = (-1j * np.trace(hf_full @ vc)).real
    mean_v = np.trace(coupling @ rho).real
    return FlowDecomposition(float(w_q), float(q_q), float(w_f), float(q_f), float(mean_v))


@dataclass(frozen=True)
class CollisionTrajectory:
    """Per-step record of a collision-model run.

    Qubit quantities are sampled at the ``n_bins + 1`` bin edges; field
    amplitudes and flows are per bin.
    """

    times: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    a_in: np.ndarray
    a_out: np.ndarray
    sigma_minus_pre: np.ndarray
    sigma_minus_mid: np.ndarray
    W_q: np.ndarray
    Q_q: np.ndarray
    W_f: np.ndarray
    Q_f: np.ndarray
    dU_q: np.ndarray
    dU_f: np.ndarray
    mean_coupling: np.ndarray
    min_eigenvalue: float
    n_max: int
    dt: float

    @property
    def excited_population(self):
        return 0.5 * (1.0 + self.z)


def simulate_coherent_collisions(bins: TimeBins, s0: QubitState, gamma: float = 1.0,
                                 n_max: Optional[int] = None) -> CollisionTrajectory:
    """Run the traced two-body stepper over every bin."""
    if bins.statistics is not Statistics.COHERENT:
        raise DomainError("the traced stepper is exact only for coherent input")
    dt = bins.dt
    if n_max is None:
        n_max = choose_n_max(float(np.max(np.abs(bins.amplitudes) ** 2, initial=0.0)))
    d = n_max + 1
    u = collision_unitary(dt, n_max, gamma)
    v = coupling_hamiltonian(dt, n_max, gamma)
    hq = np.kron(QUBIT_ENERGY, np.eye(d))
    hf = np.kron(np.eye(2), number_op(n_max))
    n = bins.n_bins
    rho = s0.density_matrix()
    xs, ys, zs = np.empty(n + 1), np.empty(n + 1), np.empty(n + 1)
    cols = {k: np.empty(n) for k in ("W_q", "Q_q", "W_f", "Q_f", "dU_q", "dU_f", "mean_coupling")}
    a_in = np.empty(n, dtype=complex)
    a_out = np.empty(n, dtype=complex)
    s_pre = np.empty(n, dtype=complex)
    s_mid = np.empty(n, dtype=complex)
    min_eig = np.inf

    def record(i, r):
        q = QubitState.from_density_matrix(r)
        xs[i], ys[i], zs[i] = q.x, q.y, q.z

    record(0, rho)
    for k in range(n):
        st = step_collision_coherent(rho, bins.amplitudes[k], u, dt)
        fl = decompose_energy_flows(st.joint_pre, st.joint_post, v)
        cols["W_q"][k], cols["Q_q"][k] = fl.W_q, fl.Q_q
        cols["W_f"][k], cols["Q_f"][k] = fl.W_f, fl.Q_f
        cols["mean_coupling"][k] = fl.mean_coupling
        cols["dU_q"][k] = np.trace(hq @ (st.joint_post - st.joint_pre)).real
        cols["dU_f"][k] = np.trace(hf @ (st.joint_post - st.joint_pre)).real
        a_in[k], a_out[k] = st.in_amplitude, st.out_amplitude
        s_pre[k] = rho[1, 0]
        s_mid[k] = 0.5 * (rho[1, 0] + st.rho_q_post[1, 0])
        min_eig = min(min_eig, st.min_eigenvalue)
        rho = 0.5 * (st.rho_q_post + st.rho_q_post.conj().T)
        record(k + 1, rho)
    return CollisionTrajectory(bins.edges, xs, ys, zs, a_in, a_out, s_pre, s_mid,
                               min_eigenvalue=float(min_eig), n_max=n_max, dt=dt, **cols)


# -- single-excitation global state ---------------------------------------------


@dataclass(frozen=True)
class GlobalSingleExcitationState:
    """Pure joint state ``c_e |e, vac> + sum_n c_n |g, 1_n>``."""

    c_e: complex
    c_bins: np.ndarray

    @property
    def norm(self) -> float:
        return float(abs(self.c_e) ** 2 + np.sum(np.abs(self.c_bins) ** 2))


@dataclass(frozen=True)
class SingleExcitationOracleTrajectory:
    times: np.ndarray
    excited_population: np.ndarray
    entropy: np.ndarray
    sigma_minus: np.ndarray
    total_excitation: np.ndarray
    energy_sum: np.ndarray
    xi_out: np.ndarray
    W_q: np.ndarray
    W_f: np.ndarray
    Q_q: np.ndarray
    Q_f: np.ndarray
    dU_q: np.ndarray
    dU_f: np.ndarray
    final_state: GlobalSingleExcitationState

    @property
    def z(self):
        return 2.0 * self.excited_population - 1.0


def _sector_pair_state(c_e, c_k, rest):
    """Qubit (x) current-bin density matrix (bin truncated at one photon) from sector amplitudes."""
    # joint basis index q*2 + n: |g0>=0, |g1>=1, |e0>=2, |e1>=3
    phi = np.array([0.0, c_k, c_e, 0.0], dtype=complex)
    rho = np.outer(phi, phi.conj())
    rho[0, 0] += rest
    return rho


def simulate_single_excitation_global(bins: TimeBins, gamma: float = 1.0,
                                      qubit_excited: complex = 0.0) -> SingleExcitationOracleTrajectory:
    """Evolve the exact pure state of the one-excitation sector collision by collision."""
    if bins.statistics is not Statistics.SINGLE_PHOTON:
        raise DomainError("single-excitation oracle needs single-photon bins")
    n = bins.n_bins
    theta = math.sqrt(gamma * bins.dt)
    c, s = math.cos(theta), math.sin(theta)
    c_e = complex(qubit_excited)
    c_bins = bins.amplitudes.astype(complex).copy()
    norm0 = abs(c_e) ** 2 + float(np.sum(np.abs(c_bins) ** 2))
    pe = np.empty(n + 1)
    sm = np.zeros(n + 1, dtype=complex)
    total = np.empty(n + 1)
    energy = np.empty(n + 1)
    flows = {k: np.empty(n) for k in ("W_q", "W_f", "Q_q", "Q_f", "dU_q", "dU_f")}
    v = coupling_hamiltonian(bins.dt, 1, gamma)
    hq = np.kron(QUBIT_ENERGY, np.eye(2))
    hf = np.kron(np.eye(2), number_op(1))
    # no |g, vac> component exists, so <sigma_-> = conj(c_{g,vac}) c_e vanishes identically
    c_gvac = 0.0

    def snapshot(i):
        pe[i] = abs(c_e) ** 2
        sm[i] = np.conj(c_gvac) * c_e
        field_n = float(np.sum(np.abs(c_bins) ** 2))
        total[i] = pe[i] + field_n
        energy[i] = pe[i] + field_n  # omega_k = omega0 for every resonant bin

    snapshot(0)
    for k in range(n):
        ck = c_bins[k]
        rest = total[k] - abs(c_e) ** 2 - abs(ck) ** 2
        pre = _sector_pair_state(c_e, ck, rest)
        c_e, c_bins[k] = c * c_e + s * ck, -s * c_e + c * ck
        post = _sector_pair_state(c_e, c_bins[k], rest)
        fl = decompose_energy_flows(pre, post, v)
        flows["W_q"][k], flows["W_f"][k] = fl.W_q, fl.W_f
        flows["Q_q"][k], flows["Q_f"][k] = fl.Q_q, fl.Q_f
        flows["dU_q"][k] = np.trace(hq @ (post - pre)).real
        flows["dU_f"][k] = np.trace(hf @ (post - pre)).real
        snapshot(k + 1)
        if abs(total[k + 1] - norm0) > 1e-8:
            raise NumericalError(f"norm drift {total[k + 1] - norm0:.3g} at bin {k}")
    xi_out = c_bins / math.sqrt(bins.dt)
    return SingleExcitationOracleTrajectory(
        bins.edges, pe, binary_entropy(pe), sm,
        total, energy, xi_out, final_state=GlobalSingleExcitationState(c_e, c_bins), **flows)


# -- full joint state -------------------------------------------------------------


def _pure_qubit_ket(state: QubitState) -> np.ndarray:
    if abs(state.radius - 1.0) > 1e-9:
        raise DomainError("full joint simulation needs a pure initial qubit state")
    w, vec = np.linalg.eigh(state.density_matrix())
    return vec[:, -1]


@dataclass(frozen=True)
class FullFockTrajectory:
    times: np.ndarray
    rho_q: np.ndarray
    norms: np.ndarray
    final_state: np.ndarray

    @property
    def z(self):
        return np.real(self.rho_q[:, 1, 1] - self.rho_q[:, 0, 0])

    @property
    def sigma_minus(self):
        return self.rho_q[:, 1, 0]


def simulate_full_fock(bins: TimeBins, n_max: int, s0: QubitState = QubitState.ground(),
                       gamma: float = 1.0) -> FullFockTrajectory:
    """Exact unitary evolution of the qubit and every bin as one state vector."""
    n = bins.n_bins
    d = n_max + 1
    if n > MAX_FULL_BINS or 2 * d**n > MAX_FULL_DIM:
        raise DomainError(f"joint dimension 2*{d}^{n} exceeds the {MAX_FULL_DIM} limit")
    if bins.statistics is Statistics.COHERENT:
        psi = _pure_qubit_ket(s0)
        for a in bins.amplitudes:
            psi = np.multiply.outer(psi, coherent_bin_state(a, n_max))
    else:
        if abs(s0.z + 1.0) > 1e-12:
            raise DomainError("single-photon input requires a ground-state qubit")
        psi = np.zeros((2,) + (d,) * n, dtype=complex)
        for k, a in enumerate(bins.amplitudes):
            idx = [0] + [0] * n
            idx[k + 1] = 1
            psi[tuple(idx)] = a
        norm = np.linalg.norm(psi)
        if norm > 0:
            psi /= norm
    psi = np.asarray(psi, dtype=complex).reshape((2,) + (d,) * n)
    u4 = collision_unitary(bins.dt, n_max, gamma).reshape(2, d, 2, d)
    rhos = np.empty((n + 1, 2, 2), dtype=complex)
    norms = np.empty(n + 1)

    def marginal(p):
        m = p.reshape(2, -1)
        return m @ m.conj().T

    rhos[0], norms[0] = marginal(psi), np.linalg.norm(psi)
    for k in range(n):
        psi = np.tensordot(u4, psi, axes=([2, 3], [0, k + 1]))
        psi = np.moveaxis(psi, 1, k + 1)
        rhos[k + 1], norms[k + 1] = marginal(psi), np.linalg.norm(psi)
    return FullFockTrajectory(bins.edges, rhos, norms, psi)
