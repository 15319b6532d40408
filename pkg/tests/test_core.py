import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from wgenergetics.core import (BLOCH_TOL, QubitState, Statistics, TimeGrid, Units,
                               cumulative_hermite, ergotropy, evaluate_envelope, gaussian,
                               normalize_pulse, qubit_energy, rising_exponential, sample_steps,
                               square, vacuum)
from wgenergetics.errors import DomainError


def random_bloch(rng, n):
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * rng.uniform(0, 1, size=(n, 1)) ** (1 / 3)


def su2(a, b, c):
    rz = lambda p: np.diag([np.exp(-0.5j * p), np.exp(0.5j * p)])
    ry = np.array([[math.cos(b / 2), -math.sin(b / 2)], [math.sin(b / 2), math.cos(b / 2)]])
    return rz(a) @ ry @ rz(c)


def brute_force_ergotropy(state, n_grid=24):
    """Energy minus the minimum of Tr[H U rho U^dag] over SU(2): dense grid, then polish."""
    rho = state.density_matrix()
    h = np.diag([0.0, 1.0])

    def energy(p):
        u = su2(*p)
        return float(np.trace(h @ u @ rho @ u.conj().T).real)

    grid = np.linspace(0, 2 * np.pi, n_grid, endpoint=False)
    best = min(((a, b, c) for a in grid for b in grid[: n_grid // 2 + 1] for c in grid[:4]),
               key=energy)
    res = optimize.minimize(energy, best, method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    return energy((0, 0, 0)) - res.fun


class TestQubitFunctionals:
    @pytest.mark.parametrize("vec, expected", [((0, 0, -1), 0.0), ((0, 0, 1), 1.0), ((1, 0, 0), 0.5)])
    def test_energy(self, vec, expected):
        assert qubit_energy(QubitState(*vec)) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("vec, expected", [
        ((0, 0, 1), 1.0), ((0, 0, 0.5), 0.5), ((1, 0, 0), 0.5), ((0, 0, -0.4), 0.0),
    ])
    def test_ergotropy_values(self, vec, expected):
        assert ergotropy(QubitState(*vec)) == pytest.approx(expected, abs=1e-15)

    def test_equator_ergotropy_matches_unitary_search(self):
        assert brute_force_ergotropy(QubitState(1, 0, 0)) == pytest.approx(0.5, abs=1e-6)

    def test_ergotropy_matches_brute_force_on_random_states(self):
        rng = np.random.default_rng(7)
        for v in random_bloch(rng, 100):
            s = QubitState(*v)
            assert ergotropy(s) == pytest.approx(brute_force_ergotropy(s), abs=1e-6)

    @pytest.mark.parametrize("vec", [(1.0, 0.1, 0.0), (0, 0, 1 + 1e-6), (np.nan, 0, 0)])
    def test_invalid_bloch_vector(self, vec):
        with pytest.raises(DomainError):
            QubitState(*vec)

    def test_roundoff_overshoot_tolerated(self):
        QubitState(0, 0, 1 + 0.5 * BLOCH_TOL)

    def test_density_matrix_roundtrip(self):
        s = QubitState(0.3, -0.4, 0.5)
        back = QubitState.from_density_matrix(s.density_matrix())
        assert np.allclose(back.as_array(), s.as_array())
        assert s.sigma_minus == pytest.approx(complex(0.15, 0.2))


unit_ball = st.tuples(*[st.floats(-1, 1)] * 3).filter(lambda v: v[0]**2 + v[1]**2 + v[2]**2 <= 1)


@given(unit_ball, st.floats(0, 2 * np.pi))
def test_ergotropy_bounded_and_phase_invariant(v, phi):
    s = QubitState(*v)
    e = ergotropy(s)
    assert -1e-15 <= e <= qubit_energy(s) + 1e-12
    assert e <= 1 + 1e-12
    c, sn = math.cos(phi), math.sin(phi)
    rotated = QubitState(c * v[0] - sn * v[1], sn * v[0] + c * v[1], v[2])
    assert ergotropy(rotated) == pytest.approx(e, abs=1e-12)


@given(unit_ball)
def test_ergotropy_equals_energy_exactly_for_pure_states(v):
    s = QubitState(*v)
    gap = qubit_energy(s) - ergotropy(s)
    assert gap == pytest.approx((1 - s.radius) / 2, abs=1e-12)
    if s.radius > 1e-12:
        u = s.as_array() / s.radius
        pure = QubitState(*u)
        assert ergotropy(pure) == pytest.approx(qubit_energy(pure), abs=1e-12)


class TestEnvelopes:
    def test_rising_exponential_values(self):
        p = rising_exponential()
        assert evaluate_envelope(p, 0.0) == pytest.approx(1.0)
        assert evaluate_envelope(p, 1.0) == 0
        assert evaluate_envelope(p, -2.0) == pytest.approx(math.exp(-1))

    def test_rate_scales_amplitude(self):
        p = rising_exponential(rate=4.0, t_start=-2.0)
        assert evaluate_envelope(p, 0.0) == pytest.approx(2.0)

    def test_zero_outside_support(self):
        p = gaussian(width=0.5)
        assert evaluate_envelope(p, -3.0) == 0
        assert np.all(evaluate_envelope(p, np.array([-10, 10.0])) == 0)

    def test_vectorised_matches_scalar(self):
        p = rising_exponential()
        t = np.linspace(-6, 1, 15)
        assert np.allclose(evaluate_envelope(p, t), [evaluate_envelope(p, x) for x in t])

    def test_deterministic(self):
        p = gaussian()
        t = np.linspace(-4, 4, 11)
        assert np.array_equal(evaluate_envelope(p, t), evaluate_envelope(p, t))

    def test_normalisation_scale_factor(self):
        p = rising_exponential()
        assert p.norm() == pytest.approx(1 - math.exp(-5), rel=1e-12)
        q = normalize_pulse(p, 1.0)
        assert q.scale == pytest.approx(1 / math.sqrt(1 - math.exp(-5)), rel=1e-12)
        assert q.norm() == pytest.approx(1.0, abs=1e-6)

    def test_normalising_normalised_pulse_is_identity(self):
        q = normalize_pulse(rising_exponential(), 1.0)
        r = normalize_pulse(q, 1.0)
        t = np.linspace(-5, 0, 7)
        assert np.allclose(evaluate_envelope(r, t), evaluate_envelope(q, t), rtol=1e-12)

    def test_square_amplitude(self):
        p = normalize_pulse(square(0, 4.0, amplitude=3.0), 2.0)
        assert evaluate_envelope(p, 1.0) == pytest.approx(math.sqrt(2.0 / 4.0))

    def test_zero_norm_rejected(self):
        with pytest.raises(DomainError):
            normalize_pulse(square(0, 1, amplitude=0.0), 1.0)

    def test_gaussian_carries_one_photon(self):
        assert gaussian(width=0.7).norm() == pytest.approx(1.0, abs=1e-6)

    def test_single_photon_overnormalised_rejected(self):
        with pytest.raises(DomainError):
            square(0, 1, amplitude=2.0, statistics=Statistics.SINGLE_PHOTON)

    def test_vacuum(self):
        assert vacuum().norm() == 0.0
        assert evaluate_envelope(vacuum(), 3.0) == 0


class TestGrid:
    def test_grid(self):
        g = TimeGrid(-5, 10, 1e-3)
        assert g.n_steps == 15000
        assert g.times[-1] == pytest.approx(10.0)
        assert g.index_of(0.0) == 5000

    @pytest.mark.parametrize("args", [(0, 1, 0.0), (1, 0, 0.1), (0, 1, 0.3)])
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            TimeGrid(*args)

    def test_units(self):
        with pytest.raises(DomainError):
            Units(gamma=0.0)
        assert "gamma = 2.0" in Units(2.0).header_lines()

    def test_step_samples_are_one_sided(self):
        p = rising_exponential()
        smp = sample_steps(p, TimeGrid(-1, 1, 0.5))
        # step [-0.5, 0] sees the pulse at its right end; step [0, 0.5] sees nothing
        assert smp.end[1] == pytest.approx(1.0)
        assert smp.start[2] == 0 and smp.end[2] == 0

    def test_misaligned_support_rejected(self):
        with pytest.raises(DomainError):
            sample_steps(rising_exponential(t_start=-5.0), TimeGrid(-6, 1.2, 0.3))


def test_hermite_quadrature_is_exact_for_cubics():
    t = np.linspace(0, 2, 9)
    f = lambda x: 1 + x - 2 * x**2 + 0.5 * x**3
    df = lambda x: 1 - 4 * x + 1.5 * x**2
    out = cumulative_hermite(f(t[:-1]), f(t[1:]), df(t[:-1]), df(t[1:]), t[1] - t[0])
    exact = t + t**2 / 2 - 2 * t**3 / 3 + t**4 / 8
    assert np.allclose(out, exact, atol=1e-13)
