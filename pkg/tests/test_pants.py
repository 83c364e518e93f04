import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from oracles import fd_turning
from dirac1d.circle import CircleOperator, spectrum
from dirac1d.potentials import constant_potential
from dirac1d.errors import DomainError, ModelRegionError
from dirac1d.interval_bvp import bvp_spectrum, from_split
from dirac1d.lagrangian import tau
from dirac1d.numerics import eigen_angles
from dirac1d.pants import (
    OuterOmega,
    PantsScenario,
    arc_turning,
    asymptotic_arc_turning,
    cauchy_data_lagrangian,
    limit_potential,
    limit_system,
    omega_limits,
    omega_t,
    omega_t_split,
    patch_turning,
    random_scenario,
    saddle_density,
    symmetric_scenario,
    transmission_matrices,
)

seeds = st.integers(0, 2**32 - 1)


def flat(spec):
    return np.array([lam for lam, k in spec for _ in range(k)])


def test_symmetric_patch_limit_is_minus_pi():
    sc = symmetric_scenario()
    assert patch_turning(sc, 1e-10) == pytest.approx(-math.pi, abs=1e-8)
    assert -2 * sc.theta_plus == pytest.approx(-math.pi)


@pytest.mark.parametrize("m", [0.25, 1.0, 4.0])
def test_asymptotic_turning_matches_fd_oracle(m):
    closed = -2 * math.atan(math.sqrt(m))
    assert asymptotic_arc_turning(m) == pytest.approx(closed, abs=1e-10)
    assert fd_turning(m, 1.0, 1e7) == pytest.approx(closed, abs=1e-8)


@pytest.mark.parametrize("m,zeta", [(0.25, 1e-3), (1.0, 0.5), (4.0, 0.02), (2.5, 1.3)])
def test_finite_arc_routes(m, zeta):
    r = 1.7
    d = math.sqrt((r * r - zeta) / (1 + m))
    q = arc_turning(m, zeta, r)
    assert q == pytest.approx(arc_turning(m, zeta, r, method="closed"), abs=1e-12)
    assert q == pytest.approx(fd_turning(m, zeta, d), abs=1e-9)


def test_saddle_density_integrates_like_turning():
    from scipy.integrate import quad

    m = 1.7
    val, _ = quad(saddle_density, -3.0, 3.0, args=(m,), epsabs=1e-14)
    # unit level, half width 3 in u: the arc of x in [-3, 3]
    assert val == pytest.approx(fd_turning(m, 1.0, 3.0), abs=1e-9)


def test_patch_turning_monotone_toward_limit():
    sc = random_scenario(np.random.default_rng(5))
    tmax = sc.beta * sc.patch_radius**2
    lim = -2 * sc.theta_plus
    errs = [abs(patch_turning(sc, f * tmax) - lim) for f in (0.5, 0.1, 0.01, 1e-4)]
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_model_region():
    sc = symmetric_scenario(patch_radius=1.0)
    with pytest.raises(ModelRegionError):
        patch_turning(sc, 1.5)
    with pytest.raises(ModelRegionError):
        omega_t_split(sc, -1.5)
    with pytest.raises(DomainError):
        patch_turning(sc, 0.0)


def test_symmetric_plus_limit_value():
    sc = symmetric_scenario(0.1, 0.1)
    assert omega_limits(sc).plus == pytest.approx(-0.05, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_limit_difference_is_minus_half(seed):
    sc = random_scenario(np.random.default_rng(seed))
    lim = omega_limits(sc)
    assert lim.plus - lim.minus == pytest.approx(-0.5, abs=1e-10)
    assert lim.minus_a + lim.minus_b == pytest.approx(lim.minus, abs=1e-12)
    assert sc.theta_plus + sc.theta_minus == math.pi


@settings(max_examples=20, deadline=None)
@given(seeds, st.floats(0.01, 1.0))
def test_component_sum(seed, s):
    sc = random_scenario(np.random.default_rng(seed))
    a, b = omega_t_split(sc, -s)
    assert a + b == pytest.approx(omega_t(sc, -s), abs=1e-14)


def test_one_sided_limits_are_approached():
    sc = random_scenario(np.random.default_rng(11))
    lim = omega_limits(sc)
    assert omega_t(sc, 1e-9) == pytest.approx(lim.plus, abs=1e-6)
    a, b = omega_t_split(sc, -1e-9)
    assert a == pytest.approx(lim.minus_a, abs=1e-6) and b == pytest.approx(lim.minus_b, abs=1e-6)


def test_plus_limit_potential_symmetric_jumps():
    P, part = limit_potential(symmetric_scenario(), "plus")
    assert np.allclose(P.jump_sizes, [-math.pi / 4, -math.pi / 4])
    assert part == [0.0, 1.0, 2.0, 3.0, 4.0]


def test_plus_limit_potential_reproduces_T_plus():
    sc = random_scenario(np.random.default_rng(2))
    P, part = limit_potential(sc, "plus")
    Tp, _ = transmission_matrices(sc)
    assert np.allclose(from_split(P, part).transmission, Tp, atol=1e-15)


def test_plus_limit_mass():
    sc = random_scenario(np.random.default_rng(3))
    P, _ = limit_potential(sc, "plus")
    assert P.total_mass == pytest.approx(2 * math.pi * sc.omega0 - sc.theta_plus, abs=1e-12)


def test_plus_limit_system_matches_circle():
    sc = random_scenario(np.random.default_rng(4))
    P, _ = limit_potential(sc, "plus")
    a = [lam for lam, _ in spectrum(CircleOperator(P), (-10, 10))]
    assert np.allclose(a, flat(bvp_spectrum(limit_system(sc, "plus"), (-10, 10))), atol=1e-9)


def test_minus_limit_system_is_union_of_components():
    sc = random_scenario(np.random.default_rng(6))
    comps = limit_potential(sc, "minus")
    union = sorted(lam for P, _ in comps for lam, _ in spectrum(CircleOperator(P), (-10, 10)))
    assert np.allclose(union, flat(bvp_spectrum(limit_system(sc, "minus"), (-10, 10))), atol=1e-9)
    lim = omega_limits(sc)
    assert comps[0][0].omega == pytest.approx(lim.minus_a, abs=1e-12)
    assert comps[1][0].omega == pytest.approx(lim.minus_b, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_transmission_matrices(seed):
    sc = random_scenario(np.random.default_rng(seed))
    Tp, Tm = transmission_matrices(sc)
    for T in (Tp, Tm):
        assert np.max(np.abs(T.conj().T @ T - np.eye(4))) < 1e-14
    ev = np.sort_complex(np.round(np.linalg.eigvals(Tm.conj().T @ Tp), 12))
    assert np.allclose(ev, np.sort_complex(np.array([1, 1, 1j, -1j])), atol=1e-10)
    assert abs(tau(Tp, Tm)) < 1e-12


def test_cauchy_data_zero_curvature():
    sc = PantsScenario(1.0, 2.0, 2.0, (1, 1, 1, 1), ((0.0,),) * 4)
    assert np.allclose(cauchy_data_lagrangian(sc).graph, np.eye(4))


def test_segment_omegas_recombine():
    sc = random_scenario(np.random.default_rng(8))
    w = sc.segment_omegas()
    assert w.sum() == pytest.approx(sc.omega0, abs=1e-12)
    assert w[0] + w[3] == pytest.approx(sc.omega0_a, abs=1e-12)
    assert w[1] + w[2] == pytest.approx(sc.omega0_b, abs=1e-12)


def test_cauchy_data_is_kernel_boundary_values():
    sc = random_scenario(np.random.default_rng(9))
    prof = sc.h0_profile()
    T0 = cauchy_data_lagrangian(sc).graph
    ends = []
    for k in range(4):
        a, b = sc.knots[k], sc.knots[k + 1]
        # -i u' + (h0 / 2) u = 0 from u(a) = 1
        sol = solve_ivp(lambda t, u: -0.5j * prof.density(t) * u, (a, b), [1.0 + 0j], rtol=1e-12, atol=1e-14)
        ends.append(sol.y[0, -1])
    # each interval carries one solution line; its incoming value equals T0 times its outgoing value
    start = np.ones(4)
    assert np.allclose(start, T0 @ np.array(ends), atol=1e-9)


def test_mollified_degeneration_converges_monotonically():
    sc = symmetric_scenario(0.13, 0.21)
    target = flat(bvp_spectrum(limit_system(sc, "plus"), (-10, 10)))
    errs = []
    for k in range(1, 8):
        op = CircleOperator(constant_potential(sc.L0, 2 * math.pi * omega_t(sc, 2.0**-k)))
        lam = np.array([x for x, _ in spectrum(op, (-12, 12))])
        errs.append(max(np.min(np.abs(lam - v)) for v in target))
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_scenario_json_round_trip():
    sc = random_scenario(np.random.default_rng(10), "x")
    back = PantsScenario.from_dict(json.loads(json.dumps(sc.to_dict())))
    assert back == sc and hash(back) == hash(sc)


def test_random_scenario_reproducible():
    a = random_scenario(np.random.default_rng(42))
    b = random_scenario(np.random.default_rng(42))
    assert a == b


def test_sampled_outer_omega():
    out = OuterOmega("samples", plus=(0.0, 0.0, 0.2), a=(0.1, 0.0, 0.0), b=(-0.1, 0.0, 0.0), t=(-1.0, 0.0, 1.0))
    assert out.dev_plus(0.5) == pytest.approx(0.1)
    assert out.dev_a(-0.5) == pytest.approx(0.05)
    with pytest.raises(DomainError):
        OuterOmega("samples", plus=(0.0, 0.1, 0.2), a=(0, 0, 0), b=(0, 0, 0), t=(-1.0, 0.0, 1.0))


def test_invalid_scenarios():
    with pytest.raises(DomainError):
        PantsScenario(-1.0, 1.0, 1.0, (1, 1, 1, 1), ((0.0,),) * 4)
    with pytest.raises(DomainError):
        PantsScenario(1.0, 1.0, 1.0, (1, 1, 1), ((0.0,),) * 4)
