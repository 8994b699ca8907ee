import numpy as np
import pytest
from numpy.testing import assert_allclose

from hybridslide import (
    Belt3Params,
    InvalidArgument,
    SimConfig,
    StickSlip2Params,
    make_case_study_1,
    make_case_study_2,
    normal_projection_matrix,
    simulate,
)
from hybridslide.models import (
    CS1_MODES,
    cs1_regime,
    oracle_lie_cs1,
    oracle_sliding_cs1,
    param_names,
    params_dict,
    params_with,
)

from test_detect import cs1_const, random_cs1

# frozen from tests/oracles/derive_values.py
COLUMN_A = {0.05: [-0.05, 0.03, 0.15, 0.07], -0.05: [-0.15, -0.07, 0.05, -0.03], 0.01: [-0.09, -0.01, 0.11, 0.03]}


@pytest.mark.parametrize("A", sorted(COLUMN_A))
def test_column_a_of_normal_projections(A):
    P, m = cs1_const(A)
    x = np.array([0.0, 0.2, 0.0, 0.2, 0.0, -0.4, 0.0])
    F = normal_projection_matrix(m, x)
    rows = [CS1_MODES[q] for q in ("q1", "q2", "q3", "q4")]
    assert_allclose(F[rows, 0], COLUMN_A[A], atol=1e-15)
    assert_allclose(oracle_lie_cs1(P, x)[:, 0], COLUMN_A[A], atol=1e-15)


def test_lie_oracle_agrees_on_random_states(rng):
    rows = [CS1_MODES[q] for q in ("q1", "q2", "q3", "q4")]
    for _ in range(1000):
        P, m, x = random_cs1(rng)
        assert_allclose(normal_projection_matrix(m, x)[rows], oracle_lie_cs1(P, x), rtol=1e-12, atol=1e-14)


def test_stickslip_flow_components():
    P = StickSlip2Params(A_amp=0.3, omega=0.5, k=0.7)
    m = make_case_study_1(P)
    x = np.array([0.4, 0.0, 0.0, 0.0, 0.0, 0.0, 1.3])
    u = 0.3 * np.sin(0.5 * 1.3)
    assert m.flow(CS1_MODES["q1"], x)[1] == pytest.approx(u - 0.7 * 0.4 - P.Fc1 - P.Fc2)
    assert m.flow(CS1_MODES["q3"], x)[3] == pytest.approx(-P.Fc1)
    assert all(m.flow(i, x)[6] == 1.0 for i in range(4))


def test_region_sign_convention():
    m = make_case_study_1()
    for q, (sa, sb) in {"q1": (1, 1), "q2": (-1, 1), "q3": (-1, -1), "q4": (1, -1)}.items():
        assert list(m.sign_matrix[:, CS1_MODES[q]]) == [sa, sb]
        assert m.region_names[CS1_MODES[q]] == q


def test_no_forces_no_events():
    P = StickSlip2Params(k=0.0, A_amp=0.0, Fc1=0.0, Fc2=0.0, x0=(0.0, 0.3, 0.0, 0.1, 0.0, 0.5))
    m = make_case_study_1(P)
    x = P.initial_state()
    for i in range(4):
        assert_allclose(m.flow(i, x)[[1, 3, 5]], 0.0)
    tr = simulate(m, x, SimConfig(t_end=10.0))
    assert tr.events == []


def test_sliding_oracle_values():
    P, m = cs1_const(0.05)
    x = np.zeros(7)
    s = oracle_sliding_cs1(P, "a1", x)
    assert s[1] == pytest.approx(-0.005) and s[5] == pytest.approx(0.06)
    assert_allclose(oracle_sliding_cs1(cs1_const(0.0)[0], "delta", x)[[1, 3, 5]], 0.0)
    assert oracle_sliding_cs1(P, "b2", x)[3] == pytest.approx(-P.Fc1)
    with pytest.raises(InvalidArgument):
        oracle_sliding_cs1(P, "c1", x)
    with pytest.raises(InvalidArgument):
        cs1_regime("c1")


def test_belt_flows():
    P = Belt3Params(amp=0.0)
    m = make_case_study_2(P)
    x = np.array([0.2, 0.9, 0.2, 0.9, 0.2, 0.9, 0.0])
    # equal positions: coupling vanishes, only own spring and friction remain
    f = m.flow(7, x)
    assert f[1] == pytest.approx(-P.k1 * 0.2 - P.Fc1)
    assert f[3] == pytest.approx(-P.k2 * 0.2 - P.Fc2)
    assert m.region_names[7] == "slip+++" and m.region_names[1] == "slip+--"
    assert_allclose(m.gamma(x), [0.4, 0.4, 0.4])


def test_belt_coupling_and_forcing():
    P = Belt3Params(amp=0.5, omega=1.0, phi=0.25, k12=0.02, k13=0.03, k23=0.04)
    m = make_case_study_2(P)
    x = np.array([1.0, 0.0, 2.0, 0.0, 4.0, 0.0, 2.0])
    u1 = 0.02 * 1.0 + 0.03 * 3.0 + 0.5 * np.sin(2.25)
    f = m.flow(0, x)
    assert f[1] == pytest.approx(u1 - P.k1 * 1.0 + P.Fc1)
    assert f[5] == pytest.approx(0.03 * -3.0 + 0.04 * -2.0 - P.k3 * 4.0 + P.Fc3)


@pytest.mark.parametrize("bad", [{"m": 0.0}, {"Fc1": -1.0}, {"k": -0.1}, {"x0": (1.0, 2.0)}])
def test_stickslip_params_validated(bad):
    with pytest.raises(InvalidArgument):
        StickSlip2Params(**bad)


@pytest.mark.parametrize("bad", [{"m2": -1.0}, {"Fc3": -0.1}, {"v_d": np.inf}, {"x0": ()}])
def test_belt_params_validated(bad):
    with pytest.raises(InvalidArgument):
        Belt3Params(**bad)


def test_initial_state_reorders_published_vector():
    P = StickSlip2Params()
    assert_allclose(P.initial_state(), [0.8295, 0.5932, 0.8491, 0.8726, 0.3725, 0.9335, 0.0])


def test_param_registry():
    assert "Fc1" in param_names("stickslip2") and "v_d" in param_names("belt3")
    assert params_with("belt3", {"amp": 2.0}).amp == 2.0
    with pytest.raises(InvalidArgument, match="bogus"):
        params_with("belt3", {"bogus": 1.0})
    with pytest.raises(InvalidArgument):
        params_with("nope", {})
    assert params_dict(StickSlip2Params())["k"] == 0.88
    with pytest.raises(InvalidArgument):
        make_case_study_1(Belt3Params())
