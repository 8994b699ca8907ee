import numpy as np
import pytest

from hybridslide import HybridModel, SimConfig, SwitchingFunction, make_case_study_1, make_case_study_2, simulate
from hybridslide.models import params_with

RUNS = [("stickslip2", {}, 120.0), ("belt3", {"amp": 0.1}, 100.0), ("belt3", {"amp": 1.0}, 100.0)]


@pytest.fixture(scope="module", params=RUNS, ids=lambda r: f"{r[0]}-{r[1]}")
def run(request):
    model_id, overrides, t_end = request.param
    P = params_with(model_id, overrides)
    model = (make_case_study_1 if model_id == "stickslip2" else make_case_study_2)(P)
    return model, simulate(model, P.initial_state(), SimConfig(t_end=t_end))


def test_events_lie_on_their_manifolds(run):
    model, tr = run
    for e in tr.events:
        g = model.gamma(e.x)
        for name in e.manifolds:
            assert abs(g[model.manifold_index(name)]) <= 1e-12, e


def test_no_sign_change_without_event(run):
    model, tr = run
    g = np.array([model.gamma(x) for x in tr.x])
    ev_t = np.array([e.t for e in tr.events])
    flips = (g[:-1] * g[1:] < 0) & (np.abs(g[1:]) > model.bands) & (np.abs(g[:-1]) > model.bands)
    for k in np.flatnonzero(flips.any(axis=1)):
        assert np.any((ev_t > tr.t[k]) & (ev_t <= tr.t[k + 1] + 1e-12)), (tr.t[k], tr.t[k + 1])


def test_samples_match_their_labels(run):
    model, tr = run
    names = list(model.region_names)
    for x, lab in zip(tr.x, tr.regime):
        if lab in names:
            i = names.index(lab)
            s = model.sign_matrix[:, i]
            assert np.all(s * model.gamma(x) >= -model.bands)


def test_time_strictly_increases(run):
    _, tr = run
    assert np.all(np.diff(tr.times) > 0)
    assert tr.status == "ok"


def with_work_state(P):
    """Stick-slip model plus a state accumulating external work minus friction losses."""
    base = make_case_study_1(P)

    def power(x):
        u = P.A_amp * np.sin(P.omega * x[6] + P.phi)
        return u * x[1] - P.Fc1 * abs(x[1] - x[3]) - P.Fc2 * abs(x[1] - x[5])

    flows = [lambda x, f=f: np.r_[f(x[:7]), power(x)] for f in base.flows]
    sw = []
    for s in base.switching:
        g = np.r_[s.gradient(np.zeros(7)), 0.0]
        sw.append(SwitchingFunction(s.name, s.value, gradient=lambda x, g=g: g, hessian=lambda x: np.zeros((8, 8))))
    return HybridModel(sw, flows, base.state_names + ("W",), base.region_names, clock_index=6)


def energy(P, x):
    return 0.5 * (P.m * x[..., 1] ** 2 + P.M1 * x[..., 3] ** 2 + P.M2 * x[..., 5] ** 2 + P.k * x[..., 0] ** 2)


def test_energy_balance_stickslip():
    P = params_with("stickslip2", {})
    model = with_work_state(P)
    tr = simulate(model, np.r_[P.initial_state(), 0.0], SimConfig(t_end=120.0))
    assert tr.events_of("SlidingEntry")
    X = tr.states
    drift = energy(P, X) - energy(P, X[0]) - X[:, 7]
    # local tolerance 1e-8 per step, a few thousand steps
    print(f"max energy balance drift {np.max(np.abs(drift)):.2e} over {len(X)} samples")
    assert np.max(np.abs(drift)) <= 1e-8 * 10 * np.sqrt(len(X))
