import dataclasses
import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac1d.circle import crossing_count_flow, spectral_flow_omega
from dirac1d.errors import DegenerateError
from dirac1d.pants import OuterOmega, PantsScenario, omega_limits, omega_t, random_scenario
from dirac1d.theorems import (
    aps_index,
    aps_index_pants,
    aps_index_pants_oracle,
    aps_index_pants_raw,
    boundary_data,
    eta_kashi_check,
    sf_limits,
    verify_all,
    verify_kashi,
    verify_main,
    xi_closed_forms,
)

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def load(name):
    return PantsScenario.from_dict(json.loads((SCENARIOS / name).read_text()))


@pytest.fixture(scope="module")
def demo():
    return load("symmetric_demo.json")


def shift_plus(sc, k):
    """Move omega_1 by k without touching the limits at t = 0."""
    out = sc.omega_outer
    plus = list(out.plus) or [0.0]
    plus[0] += k
    return dataclasses.replace(sc, omega_outer=dataclasses.replace(out, plus=tuple(plus)))


def rows(rep):
    return {r.identity: r for r in rep.rows}


def test_aps_index_pants_example():
    assert aps_index(-1, (0.3, 0.2, 0.1)) == (-2, True)


def test_aps_index_cylinder_example():
    assert aps_index(0, (0.5, -0.5)) == (0, True)


def test_aps_index_floor_shift():
    assert aps_index(-1, (1.3, 0.2, 0.1))[0] == aps_index(-1, (0.3, 0.2, 0.1))[0] - 1


def test_aps_index_degenerate():
    with pytest.raises(DegenerateError):
        aps_index(-1, (1.0, 0.2, 0.1))
    assert aps_index(-1, (1.0, 0.2, 0.1), strict=False) == (-3, False)


def test_demo_boundary_data(demo):
    bd = boundary_data(demo)
    assert bd.omega_1 == pytest.approx(0.3, abs=1e-12)
    assert bd.omega_m1_a == pytest.approx(0.15, abs=1e-12)
    assert bd.omega_m1_b == pytest.approx(0.15, abs=1e-12)


def test_demo_aps_index(demo):
    raw = aps_index_pants_raw(demo)
    # -1/2 - 0.3 + 0.3 - (1/2 - 0.3) + 2 (1/2 - 0.15)
    assert raw == pytest.approx(0.0, abs=1e-12)
    assert aps_index_pants(demo) == aps_index_pants_oracle(demo) == 0


def test_aps_index_deck_shift(demo):
    assert aps_index_pants(shift_plus(demo, 1.0)) == aps_index_pants(demo) - 1


def test_demo_sf_limits(demo):
    sf = sf_limits(demo)
    # omega_t rises from -0.05 to 0.3 and crosses 0 once
    assert omega_limits(demo).plus == pytest.approx(-0.05)
    assert (sf.plus, sf.plus_crossing) == (1, 1)
    assert sf.minus == sf.minus_a + sf.minus_b == sf.minus_crossing


def test_floor_route_down_two():
    assert spectral_flow_omega(2.7, 0.5) == -2 == crossing_count_flow(np.linspace(2.7, 0.5, 50))


def test_demo_verify_all_pass(demo):
    rep = verify_all(demo)
    assert rep.passed
    assert rows(rep)["main"].residual == 0.0
    assert rows(rep)["kashi"].residual == 0.0


def test_deck_shift_keeps_main(demo):
    base, moved = verify_main(demo), verify_main(shift_plus(demo, 1.0))
    assert moved.passed and rows(moved)["main"].residual == 0.0
    assert sf_limits(shift_plus(demo, 1.0)).plus == sf_limits(demo).plus + 1
    assert base.passed


def test_degenerate_is_inconclusive():
    rep = verify_all(load("degenerate.json"))
    assert rep.inconclusive and not rep.failed
    assert "omega_1" in rep.reason


def test_eta_kashi_symmetric(demo):
    r = rows(eta_kashi_check(demo, tol=1e-10))
    assert r["eta_kashi_plus"].status == r["eta_kashi_minus"].status == "pass"
    assert r["pair_spectrum_plus"].status == r["pair_spectrum_minus"].status == "pass"


def test_kashi_matches_xi(demo):
    r = rows(verify_kashi(demo))
    xi_p, xi_m = xi_closed_forms(demo)
    assert r["kashi_vs_xi"].rhs == pytest.approx(-(xi_p - xi_m), abs=1e-12)
    assert r["kashi"].lhs == r["kashi"].rhs


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_scenarios_pass(seed):
    sc = random_scenario(np.random.default_rng(seed), str(seed))
    rep = verify_all(sc)
    assert rep.passed or (rep.inconclusive and not rep.failed)


def test_integer_outputs_stable_under_small_perturbation():
    rng = np.random.default_rng(123)
    sc = random_scenario(rng, "p")
    out = sc.omega_outer
    bumped = dataclasses.replace(
        sc,
        omega_outer=OuterOmega(
            "poly", tuple(c + 1e-6 for c in out.plus), tuple(c + 1e-6 for c in out.a), tuple(c - 1e-6 for c in out.b)
        ),
    )
    a, b = sf_limits(sc), sf_limits(bumped)
    assert (a.plus, a.minus) == (b.plus, b.minus)
    assert aps_index_pants(sc) == aps_index_pants(bumped)
