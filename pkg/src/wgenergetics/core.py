"""Qubit states, pulse envelopes, time grids and the pointwise energy functionals.

Conventions used throughout the package:

* energies are dimensionless, in units of hbar*omega0;
* times are in the same units as ``1/gamma`` (``gamma = 1`` unless overridden);
* all amplitudes live in the frame rotating at the qubit frequency, and the
  drive is assumed resonant, so ``omega0`` only survives as the energy unit.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import DomainError

BLOCH_TOL = 1e-9
NORM_TOL = 1e-6


@dataclass(frozen=True)
class Units:
    """Unit convention written into every output header."""

    gamma: float = 1.0
    omega0: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")
        if not self.omega0 > 0:
            raise DomainError(f"omega0 must be positive, got {self.omega0}")

    def header_lines(self):
        return [
            "energy_unit = hbar*omega0",
            "time_unit = 1/gamma",
            "frame = rotating at omega0 (resonant drive)",
            f"gamma = {self.gamma!r}",
            f"omega0 = {self.omega0!r}",
        ]


@dataclass(frozen=True)
class QubitState:
    """Bloch vector ``(x, y, z)`` of a qubit in the rotating frame.

    ``z = +1`` is the excited state. The dipole is ``<sigma_-> = (x - i y)/2``.
    """

    x: float = 0.0
    y: float = 0.0
    z: float = -1.0

    def __post_init__(self):
        r2 = self.x**2 + self.y**2 + self.z**2
        if not np.isfinite(r2) or r2 > (1.0 + BLOCH_TOL) ** 2:
            raise DomainError(f"Bloch vector {self.as_array()} lies outside the unit ball")

    @classmethod
    def from_dipole(cls, sigma_minus: complex, z: float) -> "QubitState":
        return cls(2.0 * sigma_minus.real, -2.0 * sigma_minus.imag, z)

    @classmethod
    def from_density_matrix(cls, rho: np.ndarray) -> "QubitState":
        # basis order (|g>, |e>)
        s = complex(rho[1, 0])
        return cls.from_dipole(s, float(np.real(rho[1, 1] - rho[0, 0])))

    @classmethod
    def ground(cls) -> "QubitState":
        return cls(0.0, 0.0, -1.0)

    @classmethod
    def excited(cls) -> "QubitState":
        return cls(0.0, 0.0, 1.0)

    @classmethod
    def plus(cls) -> "QubitState":
        return cls(1.0, 0.0, 0.0)

    @property
    def sigma_minus(self) -> complex:
        return complex(self.x, -self.y) / 2.0

    @property
    def radius(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)

    @property
    def excited_population(self) -> float:
        return (1.0 + self.z) / 2.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def density_matrix(self) -> np.ndarray:
        """2x2 density matrix in the basis ``(|g>, |e>)``."""
        s = self.sigma_minus
        pe = self.excited_population
        return np.array([[1.0 - pe, np.conj(s)], [s, pe]], dtype=complex)


def qubit_energy(state: QubitState) -> float:
    """Mean qubit energy ``<sigma_+ sigma_->``, i.e. the excited population."""
    return (1.0 + state.z) / 2.0


def ergotropy(state: QubitState) -> float:
    """Maximal energy extractable from the qubit by a unitary, ``(z + r)/2``."""
    return (state.z + state.radius) / 2.0


def bloch_ergotropy(x, y, z):
    """Vectorised ergotropy for arrays of Bloch components."""
    return 0.5 * (z + np.sqrt(x * x + y * y + z * z))


def binary_entropy(p):
    """Von Neumann entropy (nats) of a diagonal qubit state with populations p, 1-p."""
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    out = np.zeros_like(p)
    for q in (p, 1.0 - p):
        mask = q > 0
        out[mask] -= q[mask] * np.log(q[mask])
    return out


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t0, t0 + dt, ..., t_max``."""

    t0: float
    t_max: float
    dt: float

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if not self.t_max > self.t0:
            raise DomainError(f"t_max={self.t_max} must exceed t0={self.t0}")
        n = (self.t_max - self.t0) / self.dt
        if abs(n - round(n)) > 1e-6 * max(1.0, n):
            raise DomainError(
                f"span {self.t_max - self.t0} is not a whole number of steps dt={self.dt}"
            )

    @property
    def n_steps(self) -> int:
        return int(round((self.t_max - self.t0) / self.dt))

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_steps + 1)

    def index_of(self, t: float) -> int:
        k = (t - self.t0) / self.dt
        if abs(k - round(k)) > 1e-6:
            raise DomainError(f"t={t} is not a grid point")
        k = int(round(k))
        if not 0 <= k <= self.n_steps:
            raise DomainError(f"t={t} lies outside [{self.t0}, {self.t_max}]")
        return k

    def halved(self) -> "TimeGrid":
        return TimeGrid(self.t0, self.t_max, self.dt / 2.0)


class Statistics(enum.Enum):
    COHERENT = "coherent"
    SINGLE_PHOTON = "single_photon"


@dataclass(frozen=True)
class Pulse:
    """Temporal envelope of an input light pulse in the rotating frame.

    ``shape`` is the smooth (unmasked) envelope in units of sqrt(photons/time);
    the pulse is the product ``scale * shape(t)`` restricted to the closed
    support ``[t_start, t_stop]``. For coherent statistics the envelope is the
    mean field ``<a_in(t)>``; for a single photon it is the wavefunction.
    """

    shape: Callable
    statistics: Statistics = Statistics.COHERENT
    t_start: float = -np.inf
    t_stop: float = np.inf
    label: str = ""
    derivative: Optional[Callable] = None
    scale: complex = 1.0
    _norm: Optional[float] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.t_stop >= self.t_start:
            raise DomainError(f"empty support [{self.t_start}, {self.t_stop}]")
        if self.statistics is Statistics.SINGLE_PHOTON and self.norm() > 1.0 + NORM_TOL:
            raise DomainError(
                f"single-photon wavefunction carries {self.norm():.8g} > 1 photons"
            )

    def __call__(self, t):
        return evaluate_envelope(self, t)

    def raw(self, t):
        """Unmasked envelope, used when sampling inside a step known to lie in the support."""
        return self.scale * np.asarray(self.shape(t), dtype=complex)

    def raw_derivative(self, t):
        if self.derivative is not None:
            return self.scale * np.asarray(self.derivative(t), dtype=complex)
        t = np.asarray(t, dtype=float)
        h = 1e-6 * np.maximum(1.0, np.abs(t))
        return (self.raw(t + h) - self.raw(t - h)) / (2.0 * h)

    def norm(self) -> float:
        """Photon number carried by the truncated envelope, ``int |envelope|^2 dt``."""
        if self._norm is None:
            object.__setattr__(self, "_norm", self._integrate_intensity(self.t_start, self.t_stop))
        return self._norm

    def energy_between(self, a: float, b: float) -> float:
        a, b = max(a, self.t_start), min(b, self.t_stop)
        if b <= a:
            return 0.0
        return self._integrate_intensity(a, b)

    def _integrate_intensity(self, a, b):
        if a == b:
            return 0.0
        f = lambda t: float(np.abs(self.raw(t)) ** 2)
        if np.isfinite(a) and np.isfinite(b):
            # split to help quad on long supports
            edges = np.linspace(a, b, 9)
            return float(sum(integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
                             for lo, hi in zip(edges[:-1], edges[1:])))
        return float(integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-12, limit=400)[0])

    def with_statistics(self, statistics: Statistics) -> "Pulse":
        return replace(self, statistics=statistics, _norm=None)


def evaluate_envelope(pulse: Pulse, t):
    """Envelope value at ``t``; exactly zero outside the closed support."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    inside = (t_arr >= pulse.t_start) & (t_arr <= pulse.t_stop)
    val = np.zeros(t_arr.shape, dtype=complex)
    if inside.any():
        val[inside] = pulse.raw(t_arr[inside])
    if np.ndim(t) == 0:
        return complex(val[0])
    return val


def normalize_pulse(pulse: Pulse, target: float = 1.0) -> Pulse:
    """Rescale the envelope by a positive real factor so it carries ``target`` photons."""
    norm = pulse.norm()
    if not norm > 0:
        raise DomainError("cannot normalise a zero-norm envelope")
    if not target > 0:
        raise DomainError(f"target photon number must be positive, got {target}")
    if abs(norm - target) <= 1e-15 * target:
        return pulse
    factor = math.sqrt(target / norm)
    return replace(pulse, scale=pulse.scale * factor, _norm=target)


# -- pulse factories -------------------------------------------------------


def rising_exponential(rate: float = 1.0, t_start: Optional[float] = None, t_stop: float = 0.0,
                       statistics: Statistics = Statistics.COHERENT) -> Pulse:
    """``sqrt(rate) exp(rate t / 2)`` ending at ``t_stop``; mode-matched when ``rate = gamma``.

    The support starts at ``t_start`` (default ``t_stop - 5/rate``).
    """
    if t_start is None:
        t_start = t_stop - 5.0 / rate
    sq = math.sqrt(rate)
    return Pulse(
        shape=lambda t: sq * np.exp(0.5 * rate * (np.asarray(t, dtype=float) - t_stop)),
        derivative=lambda t: 0.5 * rate * sq * np.exp(0.5 * rate * (np.asarray(t, dtype=float) - t_stop)),
        statistics=statistics,
        t_start=float(t_start),
        t_stop=float(t_stop),
        label=f"rising_exponential(rate={rate})",
    )


def gaussian(center: float = 0.0, width: float = 1.0, t_start: Optional[float] = None,
             t_stop: Optional[float] = None, statistics: Statistics = Statistics.COHERENT) -> Pulse:
    """Envelope whose intensity is a unit-area normal profile of standard deviation ``width``."""
    if t_start is None:
        t_start = center - 5.0 * width
    if t_stop is None:
        t_stop = center + 5.0 * width
    amp = (2.0 * math.pi * width**2) ** -0.25

    def shape(t):
        u = np.asarray(t, dtype=float) - center
        return amp * np.exp(-(u * u) / (4.0 * width**2))

    def derivative(t):
        u = np.asarray(t, dtype=float) - center
        return -u / (2.0 * width**2) * amp * np.exp(-(u * u) / (4.0 * width**2))

    return Pulse(shape=shape, derivative=derivative, statistics=statistics,
                 t_start=float(t_start), t_stop=float(t_stop),
                 label=f"gaussian(center={center}, width={width})")


def square(t_start: float, t_stop: float, amplitude: Optional[complex] = None,
           statistics: Statistics = Statistics.COHERENT) -> Pulse:
    """Flat envelope on ``[t_start, t_stop]``; default amplitude carries one photon."""
    if not t_stop > t_start:
        raise DomainError("square pulse needs t_stop > t_start")
    if amplitude is None:
        amplitude = 1.0 / math.sqrt(t_stop - t_start)
    amplitude = complex(amplitude)
    return Pulse(
        shape=lambda t: np.full(np.shape(t), amplitude, dtype=complex),
        derivative=lambda t: np.zeros(np.shape(t), dtype=complex),
        statistics=statistics,
        t_start=float(t_start),
        t_stop=float(t_stop),
        label=f"square(amplitude={amplitude})",
    )


def vacuum() -> Pulse:
    """No input field at all (spontaneous emission)."""
    return Pulse(
        shape=lambda t: np.zeros(np.shape(t), dtype=complex),
        derivative=lambda t: np.zeros(np.shape(t), dtype=complex),
        label="vacuum",
    )


# -- grid sampling ---------------------------------------------------------


@dataclass(frozen=True)
class StepSamples:
    """Envelope values seen from inside each step ``[t_i, t_i + dt]``.

    ``start``/``end`` are the one-sided limits at the step edges, so a pulse
    switching on or off at a grid node is resolved exactly.
    """

    start: np.ndarray
    mid: np.ndarray
    end: np.ndarray
    dstart: np.ndarray
    dend: np.ndarray


def check_support_alignment(pulse: Pulse, t0: float, t_max: float, dt: float):
    for edge in (pulse.t_start, pulse.t_stop):
        if np.isfinite(edge) and t0 < edge < t_max:
            k = (edge - t0) / dt
            if abs(k - round(k)) > 1e-6:
                raise DomainError(
                    f"pulse edge t={edge} does not fall on a step boundary (t0={t0}, dt={dt})"
                )


def sample_steps(pulse: Pulse, grid: TimeGrid) -> StepSamples:
    check_support_alignment(pulse, grid.t0, grid.t_max, grid.dt)
    t = grid.times
    a, b = t[:-1], t[1:]
    m = a + 0.5 * grid.dt
    active = (m >= pulse.t_start) & (m <= pulse.t_stop)
    zero = np.zeros(len(a), dtype=complex)

    # evaluate only where active to avoid overflow of growing shapes far off support
    def raw_at(tt):
        out = zero.copy()
        out[active] = pulse.raw(tt[active])
        return out

    def draw_at(tt):
        out = zero.copy()
        out[active] = pulse.raw_derivative(tt[active])
        return out

    return StepSamples(raw_at(a), raw_at(m), raw_at(b), draw_at(a), draw_at(b))


def cumulative_hermite(f_start, f_end, df_start, df_end, dt):
    """Cumulative integral with the endpoint-corrected trapezoidal rule.

    Each step contributes ``dt/2 (f_a + f_b) + dt^2/12 (f'_a - f'_b)``, which is
    exact for cubics and globally fourth order. Inputs are per-step one-sided
    values; the result has one more entry than steps and starts at zero.
    """
    inc = 0.5 * dt * (f_start + f_end) + dt * dt / 12.0 * (df_start - df_end)
    out = np.empty(len(inc) + 1, dtype=np.result_type(inc, float))
    out[0] = 0.0
    np.cumsum(inc, out=out[1:])
    return out
