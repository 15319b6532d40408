import math

import numpy as np
import pytest
from scipy import integrate

from wgenergetics.core import (Statistics, TimeGrid, gaussian, normalize_pulse,
                               rising_exponential, square)
from wgenergetics.errors import DomainError
from wgenergetics.single_photon import (excitation_budget, integrate_single_excitation,
                                        qubit_state_from_amplitude, single_photon_energetics)

SP = Statistics.SINGLE_PHOTON
E5 = math.exp(-5)


def inverted_exponential(renormalize=True, t_start=-5.0):
    p = rising_exponential(t_start=t_start, statistics=SP)
    return normalize_pulse(p) if renormalize else p


def quadrature_amplitude(pulse, t, gamma=1.0):
    """e(t) = sqrt(gamma) int_{t_start}^{t} exp(-gamma (t - s)/2) xi(s) ds, by adaptive quadrature."""
    hi = min(t, pulse.t_stop)
    if hi <= pulse.t_start:
        return 0.0
    f = lambda s: (math.exp(-0.5 * gamma * (t - s)) * complex(pulse.raw(s))).real
    val = integrate.quad(f, pulse.t_start, hi, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    return math.sqrt(gamma) * val


class TestInvertedExponential:
    def test_truncated_without_renormalisation(self):
        grid = TimeGrid(-5, 5, 1e-3)
        tr = integrate_single_excitation(inverted_exponential(False), grid)
        i0 = grid.index_of(0.0)
        assert tr.e_amp[i0].real == pytest.approx(1 - E5, abs=1e-10)
        assert tr.excited_population[i0] == pytest.approx((1 - E5) ** 2, abs=1e-10)

    def test_renormalised(self):
        grid = TimeGrid(-5, 5, 1e-3)
        tr = integrate_single_excitation(inverted_exponential(), grid)
        assert tr.excited_population[grid.index_of(0.0)] == pytest.approx(1 - E5, abs=1e-10)

    def test_free_decay_after_pulse(self):
        grid = TimeGrid(-5, 8, 1e-3)
        tr = integrate_single_excitation(inverted_exponential(), grid)
        i0 = grid.index_of(0.0)
        t = tr.times[i0:]
        assert np.allclose(tr.excited_population[i0:], (1 - E5) * np.exp(-t), atol=1e-10)
        assert np.allclose(tr.output_envelope[i0 + 1:], -tr.e_amp[i0 + 1:], atol=1e-15)

    def test_perfect_absorption_without_truncation(self):
        grid = TimeGrid(-40, 0, 1e-2)
        tr = integrate_single_excitation(inverted_exponential(t_start=-40.0), grid)
        assert np.max(np.abs(tr.output_envelope)) < 1e-8
        assert tr.excited_population[-1] == pytest.approx(1.0, abs=1e-8)

    def test_reduced_state_is_diagonal(self):
        tr = integrate_single_excitation(inverted_exponential(), TimeGrid(-5, 2, 1e-2))
        assert np.all(tr.sigma_minus == 0)
        assert tr.state(500).x == 0 and tr.state(500).y == 0


def test_no_input_stays_ground():
    p = square(0, 1, amplitude=0.0, statistics=SP)
    tr = integrate_single_excitation(p, TimeGrid(0, 2, 1e-2))
    assert np.all(tr.e_amp == 0)


@pytest.mark.parametrize("pulse", [
    gaussian(center=0.0, width=0.8, statistics=SP),
    normalize_pulse(square(-1.5, 0.5, statistics=SP)),
    inverted_exponential(),
    normalize_pulse(rising_exponential(rate=3.0, t_start=-2.0, statistics=SP)),
])
def test_matches_closed_form_quadrature(pulse):
    grid = TimeGrid(-5, 5, 1e-3)
    tr = integrate_single_excitation(pulse, grid)
    idx = np.arange(0, grid.n_steps + 1, 250)
    ref = np.array([quadrature_amplitude(pulse, t) for t in grid.times[idx]])
    assert np.max(np.abs(np.abs(tr.e_amp[idx]) ** 2 - ref**2)) < 1e-8


@pytest.mark.parametrize("renorm", [True, False])
def test_excitation_conservation(renorm):
    p = inverted_exponential(renorm)
    tr = integrate_single_excitation(p, TimeGrid(-5, 10, 1e-3))
    assert np.max(np.abs(excitation_budget(tr) - p.norm())) < 1e-6


def test_excitation_budget_counts_the_tail_beyond_the_grid():
    p = gaussian(center=0.0, width=1.0, statistics=SP)
    tr = integrate_single_excitation(p, TimeGrid(-5, 1, 1e-3))
    assert np.max(np.abs(excitation_budget(tr) - p.norm())) < 1e-6


class TestEnergetics:
    def test_no_work_and_correlation_energy_equals_population(self):
        tr = integrate_single_excitation(inverted_exponential(), TimeGrid(-5, 30, 1e-3))
        W, Q = single_photon_energetics(tr)
        assert np.all(W == 0)
        assert np.max(np.abs(Q - tr.excited_population)) < 1e-10
        assert Q[tr.grid.index_of(0.0)] == pytest.approx(0.99326, abs=1e-5)
        assert abs(Q[-1]) < 1e-12
        assert tr.entropy()[-1] < 1e-10

    def test_entropy_positive_while_partially_excited(self):
        tr = integrate_single_excitation(inverted_exponential(), TimeGrid(-5, 5, 1e-2))
        pe = tr.excited_population
        mid = (pe > 1e-12) & (pe < 1 - 1e-12)
        assert np.all(tr.entropy()[mid] > 0)


@pytest.mark.parametrize("e, z", [(1.0, 1.0), (0.0, -1.0), (1 / math.sqrt(2), 0.0), (0.6j, -0.28)])
def test_qubit_state_from_amplitude(e, z):
    s = qubit_state_from_amplitude(e)
    assert (s.x, s.y) == (0.0, 0.0)
    assert s.z == pytest.approx(z, abs=1e-15)


def test_qubit_state_from_amplitude_rejects_overflow():
    with pytest.raises(DomainError):
        qubit_state_from_amplitude(1.1)


def test_rejects_coherent_pulse():
    with pytest.raises(DomainError):
        integrate_single_excitation(rising_exponential(), TimeGrid(-5, 1, 1e-2))


def _peak(pulse, grid):
    return integrate_single_excitation(pulse, grid).excited_population.max()


def test_mode_matched_exponential_maximises_inversion():
    grid = TimeGrid(-10, 10, 2e-3)
    best = _peak(inverted_exponential(), grid)
    others = [_peak(gaussian(width=w, statistics=SP), grid) for w in (0.25, 0.5, 0.75, 1.0, 1.5)]
    others += [_peak(normalize_pulse(square(-d, 0.0, statistics=SP)), grid)
               for d in (0.5, 1.0, 1.5, 2.0, 3.0)]
    assert best > max(others)
    assert best == pytest.approx(1 - E5, abs=1e-8)
