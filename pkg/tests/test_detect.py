import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from hybridslide import (
    AttractiveSliding,
    DenseOutput,
    Grazing,
    NumericFailure,
    StickSlip2Params,
    Transversal,
    classify_switch_point,
    detect_sign_changes,
    locate_switch_point,
    make_case_study_1,
)
from hybridslide.detect import Mixed, secant_root
from hybridslide.models import CS1_MODES, cs1_chatter_conditions

from conftest import const_flows_1d


def test_detect_sign_changes_examples():
    assert not detect_sign_changes([0.2, -0.1], [0.1, -0.2])
    assert detect_sign_changes([0.2, -0.1], [-0.05, -0.2]).crossed == {0}
    assert detect_sign_changes([0.2, 0.1], [-0.05, -0.02]).crossed == {0, 1}


def test_detect_sign_changes_reports_landing_in_band():
    ch = detect_sign_changes([0.2, 0.1], [1e-12, 0.05])
    assert ch.crossed == frozenset() and ch.touching == {0}


def test_locate_linear_root_exact():
    dense = DenseOutput.linear(2.0, 1.0, np.array([0.0]), np.array([1.0]))
    rec = locate_switch_point(dense, lambda x: np.array([x[0] - 0.3]), [0])
    assert rec.sigma == pytest.approx(0.3, abs=1e-15)
    assert rec.t == pytest.approx(2.3)
    assert rec.manifolds == {0}


def test_locate_quadratic_root():
    dense = DenseOutput.linear(0.0, 1.0, np.array([0.0]), np.array([1.0]))
    rec = locate_switch_point(dense, lambda x: np.array([x[0] ** 2 - 0.25]), [0])
    assert rec.sigma == pytest.approx(0.5, abs=1e-10)


def test_locate_earliest_of_two():
    dense = DenseOutput.linear(0.0, 1.0, np.array([0.0]), np.array([1.0]))
    rec = locate_switch_point(dense, lambda x: np.array([x[0] - 0.7, x[0] - 0.3]), [0, 1])
    assert rec.manifolds == {1}
    assert rec.sigma == pytest.approx(0.3)
    g = [x - 0.3 for x in np.linspace(0, rec.sigma, 32, endpoint=False)]
    assert all(v < 0 for v in g)


def test_locate_simultaneous_hits_merge():
    dense = DenseOutput.linear(0.0, 1.0, np.array([0.0]), np.array([1.0]))
    rec = locate_switch_point(dense, lambda x: np.array([x[0] - 0.4, 2 * x[0] - 0.8]), [0, 1])
    assert rec.manifolds == {0, 1}


def test_secant_needs_bracket():
    with pytest.raises(NumericFailure):
        secant_root(lambda s: s + 1.0, 0.0, 1.0, 1.0, 2.0)


@given(st.floats(0.01, 0.99), st.floats(0.5, 4.0))
def test_secant_root_on_monotone_cubic(r, c):
    g = lambda s: (s - r) * (1 + c * (s - r) ** 2)
    s = secant_root(g, 0.0, 1.0, g(0.0), g(1.0))
    assert abs(g(s)) <= 1e-12


def test_classify_one_manifold_examples():
    assert classify_switch_point(const_flows_1d(1.0, -1.0), np.zeros(2), [0]) == AttractiveSliding(frozenset({0}))
    assert classify_switch_point(const_flows_1d(1.0, 1.0), np.zeros(2), [0]) == Transversal(1)
    assert classify_switch_point(const_flows_1d(-1.0, -1.0), np.zeros(2), [0]) == Transversal(0)
    assert classify_switch_point(const_flows_1d(0.0, -1.0), np.zeros(2), [0]) == Grazing(0)
    # repelling: both sides lead away, no incoming information
    assert isinstance(classify_switch_point(const_flows_1d(-1.0, 1.0), np.zeros(2), [0]), Grazing)
    assert classify_switch_point(const_flows_1d(-1.0, 1.0), np.zeros(2), [0], incoming=[2.0, 0.0]) == Transversal(1)


def cs1_const(A, Fc1=0.02, Fc2=0.06, **kw):
    """Stick-slip model whose net external force is constantly ``A``."""
    P = StickSlip2Params(k=0.0, A_amp=A, omega=0.0, phi=np.pi / 2, Fc1=Fc1, Fc2=Fc2, **kw)
    return P, make_case_study_1(P)


@pytest.mark.parametrize("A, expect", [(0.05, "T"), (0.01, "T"), (-0.05, "S")])
def test_classify_stickslip_on_a(A, expect):
    P, m = cs1_const(A)
    x = np.array([0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0])  # on a, b negative
    cls = classify_switch_point(m, x, [0])
    if expect == "T":
        assert cls == Transversal(CS1_MODES["q4"])
    else:
        assert cls == AttractiveSliding(frozenset({0}))


def random_cs1(rng):
    P = StickSlip2Params(m=rng.uniform(0.5, 2), M1=rng.uniform(0.5, 2), M2=rng.uniform(0.5, 2),
                         k=rng.uniform(0, 1), Fc1=rng.uniform(0.005, 0.1), Fc2=rng.uniform(0.005, 0.1),
                         A_amp=rng.uniform(0, 0.3), omega=rng.uniform(0, 0.2), phi=rng.uniform(0, 6.3))
    x = rng.normal(size=7)
    x[6] = rng.uniform(0, 100)
    return P, make_case_study_1(P), x


def test_classifier_matches_closed_form_inequalities(rng):
    cases = {"a1": ([0], (1, 1)), "a2": ([0], (1, -1)), "b1": ([1], (1, 1)), "b2": ([1], (-1, 1)),
             "delta": ([0, 1], (1, 1))}
    disagree = 0
    for name, (active, signs) in cases.items():
        for _ in range(1000):
            P, m, x = random_cs1(rng)
            for j in active:
                x[3 + 2 * j] = x[1]  # put the state on the active manifolds
            cls = classify_switch_point(m, x, active, signs)
            disagree += isinstance(cls, AttractiveSliding) != cs1_chatter_conditions(P, x)[name]
    assert disagree == 0


def test_classify_mixed_without_clean_pass():
    P, m = cs1_const(0.0, Fc1=0.02, Fc2=0.06)
    x = np.zeros(7)
    cls = classify_switch_point(m, x, [0, 1], (1, 1))
    assert isinstance(cls, Mixed) and cls.failing == {0}


def test_dense_output_piecewise():
    d = DenseOutput(0.0, [0.0, 0.5, 1.0], [np.array([0.0]), np.array([1.0]), np.array([0.0])])
    assert_allclose([d(0.25)[0], d(0.5)[0], d(0.75)[0]], [0.5, 1.0, 0.5])
    assert d.dt == 1.0
