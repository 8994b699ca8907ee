"""Built-in stick-slip models and closed-form references for them.

``stickslip2``
    A small mass ``m`` on a spring, forced by ``A_amp*sin(omega*t + phi)``,
    with Coulomb contacts to two free inertial masses ``M1`` and ``M2``.
    Switching on the relative velocities ``v_m - v_M1`` and ``v_m - v_M2``.
``belt3``
    Three spring-coupled masses riding a belt moving at ``v_d``.
    Switching on ``v_mj - v_d``.

Both models adjoin the time as a last clock state ``t``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .errors import InvalidArgument
from .model import HybridModel, SwitchingFunction, signs_of_region
from .sliding import SlidingRegime

# paper mode name -> region index (bit 0: v_m > v_M1, bit 1: v_m > v_M2)
CS1_MODES = {"q1": 3, "q2": 2, "q3": 0, "q4": 1}
CS1_REGION_NAMES = ("q3", "q4", "q2", "q1")
CS1_STATES = ("x_m", "v_m", "x_M1", "v_M1", "x_M2", "v_M2", "t")
CS2_STATES = ("x_m1", "v_m1", "x_m2", "v_m2", "x_m3", "v_m3", "t")


def _linear_switch(name, n, plus, minus, offset=0.0):
    grad = np.zeros(n)
    grad[plus] = 1.0
    if minus is not None:
        grad[minus] = -1.0
    grad.setflags(write=False)
    hess = np.zeros((n, n))
    hess.setflags(write=False)
    if minus is None:
        def value(x):
            return x[plus] - offset
    else:
        def value(x):
            return x[plus] - x[minus]
    return SwitchingFunction(name, value, gradient=lambda x: grad, hessian=lambda x: hess)


@dataclass(frozen=True)
class StickSlip2Params:
    """Parameters of the two-contact stick-slip model (SI units).

    ``x0`` is ``(x_m, v_m, x_M1, v_M1, x_M2, v_M2)``.  The defaults are the
    published run; its initial vector lists the three positions first and
    the three velocities after, which is re-ordered here.
    """

    m: float = 1.0
    M1: float = 1.0
    M2: float = 1.0
    k: float = 0.88
    Fc1: float = 0.01996
    Fc2: float = 0.062
    A_amp: float = 1.0
    omega: float = 0.073
    phi: float = 0.0
    x0: tuple = (0.8295, 0.5932, 0.8491, 0.8726, 0.3725, 0.9335)

    def __post_init__(self):
        if min(self.m, self.M1, self.M2) <= 0:
            raise InvalidArgument("masses must be positive")
        if min(self.Fc1, self.Fc2) < 0 or self.k < 0:
            raise InvalidArgument("friction levels and stiffness must be non-negative")
        if len(self.x0) != 6:
            raise InvalidArgument("x0 needs 6 entries")
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))

    def forcing(self, t):
        return self.A_amp * np.sin(self.omega * t + self.phi)

    def initial_state(self) -> np.ndarray:
        return np.array(self.x0 + (0.0,))


@dataclass(frozen=True)
class Belt3Params:
    """Parameters of the three-block belt model (SI units).

    ``x0`` is ``(x_m1, v_m1, x_m2, v_m2, x_m3, v_m3)``; defaults re-order the
    published positions-then-velocities vector.  ``amp``, ``omega`` and
    ``phi`` describe a sinusoidal force acting on the first block.
    """

    m1: float = 1.0
    m2: float = 1.0
    m3: float = 1.0
    k1: float = 0.01
    k2: float = 0.01
    k3: float = 0.01
    k12: float = 0.01
    k13: float = 0.01
    k23: float = 0.01
    Fc1: float = 0.14
    Fc2: float = 0.13
    Fc3: float = 0.12
    v_d: float = 0.5
    amp: float = 1.0
    omega: float = 0.24
    phi: float = 0.0
    x0: tuple = (4.7799, 1.7144, 0.2797, 1.2922, 4.0038, 4.1263)

    def __post_init__(self):
        if min(self.m1, self.m2, self.m3) <= 0:
            raise InvalidArgument("masses must be positive")
        if not np.isfinite(self.v_d):
            raise InvalidArgument("belt speed must be finite")
        if min(self.Fc1, self.Fc2, self.Fc3) < 0:
            raise InvalidArgument("friction levels must be non-negative")
        if len(self.x0) != 6:
            raise InvalidArgument("x0 needs 6 entries")
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))

    def forcing(self, t):
        return self.amp * np.sin(self.omega * t + self.phi)

    def initial_state(self) -> np.ndarray:
        return np.array(self.x0 + (0.0,))


def make_case_study_1(params: StickSlip2Params | None = None) -> HybridModel:
    """Two-contact stick-slip model with four slip modes."""
    P = params or StickSlip2Params()
    if not isinstance(P, StickSlip2Params):
        raise InvalidArgument("expected StickSlip2Params")
    m, M1, M2, k, Fc1, Fc2 = P.m, P.M1, P.M2, P.k, P.Fc1, P.Fc2
    amp, om, ph = P.A_amp, P.omega, P.phi

    def make_flow(s1, s2):
        F1, F2 = s1 * Fc1, s2 * Fc2

        def f(x):
            u = amp * np.sin(om * x[6] + ph)
            return np.array([x[1], (u - k * x[0] - F1 - F2) / m, x[3], F1 / M1, x[5], F2 / M2, 1.0])

        return f

    flows = [make_flow(*signs_of_region(r, 2)) for r in range(4)]
    switching = (_linear_switch("a", 7, 1, 3), _linear_switch("b", 7, 1, 5))
    return HybridModel(switching, flows, CS1_STATES, CS1_REGION_NAMES, clock_index=6, name="stickslip2")


def cs1_regime(label: str) -> SlidingRegime:
    """Sliding regime for one of ``a1, a2, b1, b2, delta``."""
    table = {
        "a1": ({0}, (1, 1)),
        "a2": ({0}, (1, -1)),
        "b1": ({1}, (1, 1)),
        "b2": ({1}, (-1, 1)),
        "delta": ({0, 1}, (1, 1)),
    }
    if label not in table:
        raise InvalidArgument(f"unknown regime {label!r}")
    active, signs = table[label]
    return SlidingRegime(frozenset(active), signs)


def oracle_lie_cs1(params: StickSlip2Params, x) -> np.ndarray:
    """Closed-form normal projections, rows q1..q4, columns (a, b)."""
    P = params
    A = P.forcing(x[6]) - P.k * x[0]
    ca = (P.m + P.M1) / P.M1
    cb = (P.m + P.M2) / P.M2
    F1, F2 = P.Fc1, P.Fc2
    return np.array([
        [A - ca * F1 - F2, A - F1 - cb * F2],
        [A + ca * F1 - F2, A + F1 - cb * F2],
        [A + ca * F1 + F2, A + F1 + cb * F2],
        [A - ca * F1 + F2, A - F1 + cb * F2],
    ]) / P.m


def oracle_sliding_cs1(params: StickSlip2Params, regime: str, x) -> np.ndarray:
    """Closed-form sliding field (6 mechanical components) of a named regime."""
    P = params
    A = P.forcing(x[6]) - P.k * x[0]
    vel = (x[1], x[3], x[5])
    if regime == "a1":
        a = (A - P.Fc2) / (P.m + P.M1)
        acc = (a, a, P.Fc2 / P.M2)
    elif regime == "a2":
        a = (A + P.Fc2) / (P.m + P.M1)
        acc = (a, a, -P.Fc2 / P.M2)
    elif regime == "b1":
        a = (A - P.Fc1) / (P.m + P.M2)
        acc = (a, P.Fc1 / P.M1, a)
    elif regime == "b2":
        a = (A + P.Fc1) / (P.m + P.M2)
        acc = (a, -P.Fc1 / P.M1, a)
    elif regime == "delta":
        a = A / (P.m + P.M1 + P.M2)
        acc = (a, a, a)
    else:
        raise InvalidArgument(f"unknown regime {regime!r}")
    return np.array([vel[0], acc[0], vel[1], acc[1], vel[2], acc[2]])


def cs1_chatter_conditions(params: StickSlip2Params, x) -> dict:
    """Closed-form attractivity inequalities for each sliding regime."""
    P = params
    A = P.forcing(x[6]) - P.k * x[0]
    ca = (P.m + P.M1) / P.M1
    cb = (P.m + P.M2) / P.M2
    c1 = abs(A - P.Fc2) < ca * P.Fc1
    c2 = abs(A - P.Fc1) < cb * P.Fc2
    c3 = abs(A + P.Fc1) < cb * P.Fc2
    c4 = abs(A + P.Fc2) < ca * P.Fc1
    return {"a1": c1, "a2": c4, "b1": c2, "b2": c3, "delta": c1 and c2 and c3 and c4}


def make_case_study_2(params: Belt3Params | None = None) -> HybridModel:
    """Three-block belt model with eight slip modes."""
    P = params or Belt3Params()
    if not isinstance(P, Belt3Params):
        raise InvalidArgument("expected Belt3Params")
    masses = (P.m1, P.m2, P.m3)
    ks = (P.k1, P.k2, P.k3)
    Fc = (P.Fc1, P.Fc2, P.Fc3)
    k12, k13, k23 = P.k12, P.k13, P.k23
    amp, om, ph = P.amp, P.omega, P.phi

    def make_flow(signs):
        F = [s * f for s, f in zip(signs, Fc)]

        def f(x):
            x1, x2, x3 = x[0], x[2], x[4]
            u1 = k12 * (x2 - x1) + k13 * (x3 - x1) + amp * np.sin(om * x[6] + ph)
            u2 = k12 * (x1 - x2) + k23 * (x3 - x2)
            u3 = k13 * (x1 - x3) + k23 * (x2 - x3)
            return np.array([
                x[1], (u1 - ks[0] * x1 - F[0]) / masses[0],
                x[3], (u2 - ks[1] * x2 - F[1]) / masses[1],
                x[5], (u3 - ks[2] * x3 - F[2]) / masses[2],
                1.0,
            ])

        return f

    flows, names = [], []
    for r in range(8):
        s = signs_of_region(r, 3)
        flows.append(make_flow(s))
        names.append("slip" + "".join("+" if v > 0 else "-" for v in s))
    switching = tuple(_linear_switch(n, 7, 2 * j + 1, None, P.v_d) for j, n in enumerate("abc"))
    return HybridModel(switching, flows, CS2_STATES, tuple(names), clock_index=6, name="belt3")


MODELS = {
    "stickslip2": (StickSlip2Params, make_case_study_1),
    "belt3": (Belt3Params, make_case_study_2),
}


def param_names(model_id: str) -> list:
    return [f.name for f in fields(MODELS[model_id][0])]


def params_with(model_id: str, overrides: dict):
    """Default parameter record of ``model_id`` with ``overrides`` applied."""
    if model_id not in MODELS:
        raise InvalidArgument(f"unknown model {model_id!r}; choose from {sorted(MODELS)}")
    cls = MODELS[model_id][0]
    unknown = set(overrides) - set(param_names(model_id))
    if unknown:
        raise InvalidArgument(f"unknown parameter(s) for {model_id}: {', '.join(sorted(unknown))}")
    return replace(cls(), **overrides)


def params_dict(params) -> dict:
    return asdict(params)
