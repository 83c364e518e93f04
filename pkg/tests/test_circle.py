import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import random_nice_potential, random_trig
from dirac1d.circle import (
    CircleOperator,
    crossing_count_flow,
    eigenfunction,
    eta_from_omega,
    eta_via_zeta,
    eta_xi,
    kernel_bound,
    resolvent_apply,
    resolvent_gap_distance,
    resolvent_kernel,
    sf_xi_residual,
    spectral_flow,
    spectral_flow_omega,
    spectrum,
)
from dirac1d.errors import DegenerateError, PreconditionError
from dirac1d.interval_bvp import bvp_spectrum, from_split
from dirac1d.potentials import (
    MeasurePotential,
    ZeroProfile,
    constant_potential,
    linear_combination,
    mollify_family,
)

TWO_PI = 2 * math.pi


def values(spec):
    return np.array([lam for lam, _ in spec])


def test_free_spectrum():
    spec = spectrum(CircleOperator(MeasurePotential(TWO_PI)), (-2.5, 2.5))
    assert np.allclose(values(spec), [-2, -1, 0, 1, 2], atol=1e-14)
    assert [n for _, n in spec] == [-2, -1, 0, 1, 2]


def test_half_integer_omega_spectrum():
    op = CircleOperator(constant_potential(TWO_PI, math.pi))
    assert np.allclose(values(spectrum(op, (-3, 3))), np.arange(-3, 3) + 0.5, atol=1e-14)


def test_single_jump_matches_secular_route():
    P = MeasurePotential(1.0, ZeroProfile(), ((0.3, math.pi / 2),))
    circ = values(spectrum(CircleOperator(P), (-30, 30)))
    assert np.allclose(circ, [TWO_PI * (n + 0.25) for n in range(-5, 5)], atol=1e-13)
    bvp = values(bvp_spectrum(from_split(P, [0.3]), (-30, 30)))
    assert np.allclose(circ, bvp, atol=1e-10)


def test_eigenfunction_free_constant():
    op = CircleOperator(MeasurePotential(TWO_PI))
    assert np.allclose(eigenfunction(op, 0, np.linspace(0, TWO_PI, 7)), 1.0)


def test_eigenfunction_endpoints_and_modulus(rng):
    P = random_nice_potential(rng, n_jumps=2)
    op = CircleOperator(P)
    t = np.linspace(0, P.length, 301)
    for n in (-2, 0, 3):
        psi = eigenfunction(op, n, t)
        assert np.allclose(np.abs(psi), 1.0)
        assert abs(psi[0] - 1) < 1e-12 and abs(psi[-1] - 1) < 1e-12


def test_eigenfunction_jump_ratio():
    c = 1.1
    op = CircleOperator(MeasurePotential(1.0, ZeroProfile(), ((0.4, c),)))
    right = eigenfunction(op, 2, 0.4)
    left = eigenfunction(op, 2, 0.4 - 1e-13)
    assert abs(right / left - np.exp(-1j * c)) < 1e-10


def test_eigenfunction_solves_ode_on_smooth_piece(rng):
    P = random_nice_potential(rng, n_jumps=1)
    op = CircleOperator(P)
    p = P.jump_positions[0]
    t = np.linspace(0.1 * p, 0.9 * p, 9)
    h = 1e-5
    for n in (-1, 0, 2):
        d = (eigenfunction(op, n, t + h) - eigenfunction(op, n, t - h)) / (2 * h)
        lhs = -1j * d + P.ac.density(t) * eigenfunction(op, n, t)
        assert np.allclose(lhs, op.eigenvalue(n) * eigenfunction(op, n, t), atol=1e-7)


def test_free_kernel_below_diagonal():
    L = 2.0
    op = CircleOperator(MeasurePotential(L))
    t, s = 0.3, 1.4
    assert resolvent_kernel(op, t, s) == pytest.approx(1j * math.exp(t - s) / (math.exp(-L) - 1), abs=1e-15)


def test_resolvent_on_eigenfunctions(rng):
    P = random_nice_potential(rng, n_jumps=2)
    op = CircleOperator(P)
    t = np.linspace(0, P.length, 37)
    for n in range(-2, 3):
        u = resolvent_apply(op, lambda s: eigenfunction(op, n, s), t)
        assert np.max(np.abs(u - eigenfunction(op, n, t) / (1j + op.eigenvalue(n)))) < 1e-8


def test_kernel_bound_uniform(rng):
    L = 1.5
    op0 = CircleOperator(MeasurePotential(L))
    C = kernel_bound(op0)
    T, S = np.meshgrid(np.linspace(0, L, 41), np.linspace(0, L, 41))
    for _ in range(100):
        P = random_nice_potential(rng, length=L)
        op = CircleOperator(P)
        assert kernel_bound(op) == C
        assert np.max(np.abs(resolvent_kernel(op, T, S))) <= C


def test_gap_distance_zero_for_same_operator():
    op = CircleOperator(MeasurePotential(1.0, ZeroProfile(), ((0.5, 1.0),)))
    assert resolvent_gap_distance(op, op) == 0.0


def test_gap_distance_decreases_under_mollification():
    P = MeasurePotential(1.0, ZeroProfile(), ((0.5, 2.0),))
    op = CircleOperator(P)
    d = [resolvent_gap_distance(op, CircleOperator(mollify_family(P, e))) for e in (0.2, 0.1, 0.05)]
    assert d[0] > d[1] > d[2] > 0


def test_gap_distance_is_not_spectral():
    L = 1.0
    P = MeasurePotential(L, random_trig(np.random.default_rng(1), L), ())
    Q = linear_combination([1.0, 1.0], [P, constant_potential(L, TWO_PI)])
    a, b = CircleOperator(P), CircleOperator(Q)
    assert np.allclose(values(spectrum(a, (-40, 40))), values(spectrum(b, (-40, 40))), atol=1e-12)
    assert resolvent_gap_distance(a, b) > 1e-2


def test_gap_distance_needs_enough_nodes():
    op = CircleOperator(MeasurePotential(1.0))
    with pytest.raises(PreconditionError):
        resolvent_gap_distance(op, op, quadrature_n=8)


def test_eta_zero_omega():
    r = eta_xi(CircleOperator(MeasurePotential(TWO_PI)))
    assert (r.rho, r.eta0, r.kernel_dim, r.xi) == (0.0, 0.0, 1, 0.5)


def test_eta_quarter():
    r = eta_xi(CircleOperator(constant_potential(1.0, TWO_PI * 0.25)))
    assert r.eta0 == pytest.approx(0.5) and r.xi == pytest.approx(0.25) and r.kernel_dim == 0


def test_eta_closed_form_vs_zeta():
    r = eta_from_omega(0.3)
    assert abs(eta_via_zeta(0.3, 1.7) - r.eta0) < 1e-9
    mp = float(mpmath.zeta(0, 0.3) - mpmath.zeta(0, 0.7))
    assert abs(mp - r.eta0) < 1e-12


@pytest.mark.parametrize("s", [-0.5, 0.5, 2.0])
def test_eta_function_off_zero(s):
    rho, L = 0.37, 2.3
    want = float((L / TWO_PI) ** s * (mpmath.zeta(s, rho) - mpmath.zeta(s, 1 - rho)))
    assert eta_via_zeta(rho, L, s) == pytest.approx(want, rel=1e-10, abs=1e-11)


def test_spectral_flow_examples():
    assert spectral_flow_omega(0.3, 2.7) == 2
    assert spectral_flow_omega(0.5, -1.2) == -2
    assert crossing_count_flow(np.linspace(0.5, -1.2, 200)) == -2
    P = constant_potential(1.0, 1.0)
    assert spectral_flow(P, P) == 0


def test_spectral_flow_degenerate_endpoint():
    with pytest.raises(DegenerateError):
        spectral_flow_omega(1.0, 2.5)


def test_crossing_count_examples():
    assert crossing_count_flow([0.3] * 10) == 0
    assert crossing_count_flow(np.linspace(0.3, 2.7, 100)) == 2
    up = np.linspace(0.5, 1.5, 50)
    assert crossing_count_flow(np.concatenate([up, up[::-1]])) == 0


def test_crossing_count_errors():
    with pytest.raises(PreconditionError):
        crossing_count_flow([0.3, 0.9])
    with pytest.raises(DegenerateError):
        crossing_count_flow(np.linspace(0.0, 0.4, 5))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.3, 3.0))
def test_rescaling_covariance(seed, c):
    P = random_nice_potential(np.random.default_rng(seed))
    a = values(spectrum(CircleOperator(P, c), (-30, 30)))
    b = c * values(spectrum(CircleOperator(P.scaled(1 / c)), (-30 / c, 30 / c)))
    assert a.shape == b.shape and np.allclose(a, b, atol=1e-11)


@settings(max_examples=60, deadline=None)
@given(st.floats(-5, 5), st.floats(0.5, 4.0))
def test_spectral_symmetry_iff_eta_vanishes(omega, L):
    # eta jumps at the kernel; skip offsets between the snap and symmetry tolerances
    gap = abs(omega - round(omega))
    assume(gap < 1e-13 or gap > 1e-6)
    op = CircleOperator(constant_potential(L, TWO_PI * omega))
    lam = values(spectrum(op, (-20, 20)))
    symmetric = np.allclose(np.sort(lam), np.sort(-lam), atol=1e-9)
    assert symmetric == (abs(eta_xi(op).eta0) < 1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(-20, 20), st.floats(-20, 20))
def test_sf_xi_identity(w0, w1):
    if abs(w0 - round(w0)) < 1e-9 or abs(w1 - round(w1)) < 1e-9:
        return
    assert abs(sf_xi_residual(w0, w1)) < 1e-12
