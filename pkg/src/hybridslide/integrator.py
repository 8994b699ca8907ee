"""Event-driven simulation of piecewise-smooth models with sliding.

Off the switching manifolds the state is advanced with the explicit
midpoint rule.  Crossings are located on the step's dense output and
classified; attractive encounters switch to sliding, integrated with the
two-stage implicit Bathe scheme (trapezoidal half step, then a
three-point backward difference) with each stage projected back onto the
active manifolds.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .detect import DenseOutput, locate_switch_point, secant_root
from .errors import InvalidArgument, NumericFailure
from .model import HybridModel, OnManifold, region_index, region_of_signs, signs_of_region
from .sliding import (
    Continue,
    ExitTo,
    GoTo,
    ReduceTo,
    SlideTo,
    SlidingRegime,
    exit_monitor,
    regime_margin,
    select_regime,
    sliding_field_and_weights,
    solve_kappa,
)

logger = logging.getLogger(__name__)

SAFETY = 0.9
GROW_MIN, GROW_MAX = 0.2, 5.0


@dataclass
class SimConfig:
    """Step-size bounds, tolerances and iteration caps of a run."""

    t_end: float = 10.0
    dt_init: float = 1e-3
    dt_min: float = 1e-12
    dt_max: float = 0.1
    atol: float = 1e-8
    rtol: float = 1e-8
    eps_root: float = 1e-12
    eps_slide: float = 1e-12
    eps_exit: float = 1e-6
    eps_L: float = 1e-9
    eps_den: float = 1e-14
    max_newton: int = 20
    n_fixed_point: int = 25
    grazing_retries: int = 8
    adaptive: bool = True
    max_steps: int = 5_000_000

    def __post_init__(self):
        if not 0 < self.dt_min <= self.dt_init <= self.dt_max:
            raise InvalidArgument("need 0 < dt_min <= dt_init <= dt_max")
        tols = [self.atol, self.rtol, self.eps_root, self.eps_slide, self.eps_exit, self.eps_L, self.eps_den]
        if min(tols) <= 0:
            raise InvalidArgument("all tolerances must be positive")
        if self.t_end < 0:
            raise InvalidArgument("t_end must be non-negative")


@dataclass
class TraceEvent:
    t: float
    kind: str  # Crossing | SlidingEntry | SlidingExit | RegimeChange | Grazing
    manifolds: tuple
    from_: str
    to: str
    x: np.ndarray
    kappas: Optional[list] = None

    def to_dict(self) -> dict:
        out = {"t": self.t, "kind": self.kind, "manifolds": list(self.manifolds),
               "from": self.from_, "to": self.to, "x": [float(v) for v in self.x]}
        if self.kappas is not None:
            out["kappas"] = [float(k) for k in self.kappas]
        return out


MODE_SWITCH_KINDS = ("Crossing", "SlidingEntry", "SlidingExit", "RegimeChange")


@dataclass
class SimTrace:
    """Accepted samples, event log and per-step sliding diagnostics."""

    state_names: tuple
    clock_index: Optional[int] = None
    t: list = field(default_factory=list)
    x: list = field(default_factory=list)
    regime: list = field(default_factory=list)
    events: list = field(default_factory=list)
    sliding_log: list = field(default_factory=list)
    weight_log: list = field(default_factory=list)
    status: str = "ok"
    message: str = ""

    def add(self, t, x, label):
        self.t.append(float(t))
        self.x.append(np.array(x, dtype=float))
        self.regime.append(label)

    @property
    def times(self) -> np.ndarray:
        return np.array(self.t)

    @property
    def states(self) -> np.ndarray:
        return np.array(self.x)

    @property
    def n_steps(self) -> int:
        return len(self.t) - 1

    def events_of(self, kind: str) -> list:
        return [e for e in self.events if e.kind == kind]

    @property
    def mode_switches(self) -> int:
        return sum(e.kind in MODE_SWITCH_KINDS for e in self.events)

    def column(self, name: str) -> np.ndarray:
        return self.states[:, self.state_names.index(name)]

    def csv_columns(self) -> list:
        return [k for k in range(len(self.state_names)) if k != self.clock_index]

    def to_csv(self, fh=None) -> Optional[str]:
        """Write ``t,<states>,regime`` rows with 17 significant digits."""
        own = fh is None
        fh = io.StringIO() if own else fh
        cols = self.csv_columns()
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [self.state_names[k] for k in cols] + ["regime"])
        for t, x, lab in zip(self.t, self.x, self.regime):
            w.writerow([f"{t:.17g}"] + [f"{x[k]:.17g}" for k in cols] + [lab])
        return fh.getvalue() if own else None

    def events_json(self) -> str:
        return json.dumps([e.to_dict() for e in self.events], indent=1)


class SimulationFailed(NumericFailure):
    """Unrecoverable numeric failure; ``trace`` holds the partial run."""

    def __init__(self, message, trace: SimTrace):
        super().__init__(message)
        self.trace = trace


# -- steppers -------------------------------------------------------------------------


def rk2_step(model: HybridModel, i: int, x, t: float, dt: float):
    """Explicit midpoint step with flow ``i``; returns the new state and a dense output."""
    x = np.asarray(x, dtype=float)
    k1 = model.flow(i, x)
    x_next = x + dt * model.flow(i, x + 0.5 * dt * k1)
    if not np.all(np.isfinite(x_next)):
        raise NumericFailure("non-finite state after RK2 step", where=f"t={t}, flow {i}")
    return x_next, DenseOutput.linear(t, dt, x, x_next)


def project_to_manifold(model: HybridModel, x_star, active, max_newton: int = 20,
                        eps: float = 1e-12, full_output: bool = False):
    """Closest point to ``x_star`` on the intersection of the ``active`` manifolds.

    Newton iteration on the stationarity conditions of the Lagrangian
    ``0.5 |x - x_star|^2 + lambda . gamma(x)`` with one multiplier per active
    manifold.  With ``full_output`` also returns the multipliers and the
    number of Newton iterations.

    The constraints are always met to ``eps``.  Stationarity is held to
    ``eps`` as well unless some active gradient is finite-differenced, in
    which case its rounding noise sets a floor of ``1e-8``.
    """
    active = sorted(active)
    x_star = np.asarray(x_star, dtype=float)
    n, m = x_star.size, len(active)
    x = x_star.copy()
    lam = np.zeros(m)
    eps_stat = eps if all(model.switching[j].gradient is not None for j in active) else max(eps, 1e-8)
    for it in range(max_newton + 1):
        grads = np.array([model.gradient(j, x) for j in active]).reshape(m, n)
        gam = np.array([model.switching[j].value(x) for j in active])
        stat = x - x_star + grads.T @ lam
        G = np.concatenate([stat, gam])
        if np.max(np.abs(gam)) <= eps and np.max(np.abs(stat)) <= eps_stat:
            return (x, lam, it) if full_output else x
        if it == max_newton:
            break
        H = np.eye(n)
        for k, j in enumerate(active):
            if lam[k] != 0.0:
                H = H + lam[k] * model.hessian(j, x)
        K = np.block([[H, grads.T], [grads, np.zeros((m, m))]])
        try:
            d = np.linalg.solve(K, -G)
        except np.linalg.LinAlgError as exc:
            raise NumericFailure("singular projection system", where=f"x*={x_star}") from exc
        x = x + d[:n]
        lam = lam + d[n:]
        if not np.all(np.isfinite(x)):
            break
    raise NumericFailure("projection did not converge", where=f"x*={x_star}", residual=float(np.max(np.abs(G))))


def _sliding_field(model, regime, x, cfg):
    return sliding_field_and_weights(model, x, regime, cfg.eps_slide)[0]


def _implicit_stage(fun, predictor, cfg, where):
    """Solve ``y = fun(y)`` by fixed point, then finite-difference Newton."""
    y = predictor
    d_prev = None
    for _ in range(cfg.n_fixed_point):
        y_new = fun(y)
        d = float(np.max(np.abs(y_new - y)))
        tol = 1e-14 * (1.0 + float(np.max(np.abs(y_new))))
        if d <= tol:
            return y_new
        if d_prev:
            # contraction bound on the distance to the fixed point
            r = d / d_prev
            if r < 0.5 and d * r / (1.0 - r) <= tol:
                return y_new
        y, d_prev = y_new, d
    for _ in range(cfg.max_newton):
        r = y - fun(y)
        if np.max(np.abs(r)) <= 1e-14 * (1.0 + np.max(np.abs(y))):
            return y
        h = np.maximum(1e-7, 1e-7 * np.abs(y))
        J = np.eye(y.size)
        for k in range(y.size):
            e = np.zeros_like(y)
            e[k] = h[k]
            J[:, k] = ((y + e - fun(y + e)) - (y - e - fun(y - e))) / (2 * h[k])
        y = y - np.linalg.solve(J, r)
    raise NumericFailure("implicit stage did not converge", where=where)


def bathe_sliding_step(model: HybridModel, regime: SlidingRegime, x, t: float, dt: float,
                       config: SimConfig | None = None, f0=None) -> np.ndarray:
    """One projected Bathe step of the sliding dynamics.

    ``f0`` may carry the sliding field at ``x`` when the caller has it.
    """
    cfg = config or SimConfig()
    x = np.asarray(x, dtype=float)
    active = regime.active

    def fs(y):
        return _sliding_field(model, regime, y, cfg)

    f0 = fs(x) if f0 is None else f0
    half = _implicit_stage(lambda y: x + 0.25 * dt * (f0 + fs(y)), x + 0.5 * dt * f0, cfg, f"t={t}, half stage")
    half = project_to_manifold(model, half, active, cfg.max_newton, cfg.eps_root)
    fh = fs(half)
    full = _implicit_stage(lambda y: -x / 3.0 + 4.0 / 3.0 * half + dt / 3.0 * fs(y),
                           half + 0.5 * dt * fh, cfg, f"t={t}, full stage")
    full = project_to_manifold(model, full, active, cfg.max_newton, cfg.eps_root)
    if not np.all(np.isfinite(full)):
        raise NumericFailure("non-finite state after sliding step", where=f"t={t}")
    return full


# -- simulation loop ------------------------------------------------------------------


Mode = Union[int, SlidingRegime]


class _Run:
    """Mutable state of one simulation; owned by a single call of simulate()."""

    def __init__(self, model: HybridModel, x0, cfg: SimConfig, mode: Optional[Mode]):
        self.model = model
        self.cfg = cfg
        self.t = 0.0
        self.x = np.asarray(x0, dtype=float).copy()
        self.dt = cfg.dt_init
        self.touching: frozenset = frozenset()
        self.graze_count = 0
        self.trace = SimTrace(model.state_names, model.clock_index)
        self.mode = self._initial_mode(mode)
        self.trace.add(self.t, self.x, self.label(self.mode))
        self.steps = 0

    # bookkeeping

    def label(self, mode: Mode) -> str:
        if isinstance(mode, SlidingRegime):
            return mode.label(self.model)
        return self.model.region_names[mode]

    def names(self, manifolds) -> tuple:
        return tuple(self.model.switching[j].name for j in sorted(manifolds))

    def event(self, kind, manifolds, old, new, x, t, kappas=None):
        ev = TraceEvent(t, kind, self.names(manifolds), self.label(old), self.label(new), np.array(x), kappas)
        self.trace.events.append(ev)
        logger.debug("t=%.6f %s %s -> %s", t, kind, ev.from_, ev.to)

    def _initial_mode(self, mode):
        model = self.model
        if isinstance(mode, SlidingRegime):
            return mode
        if mode is not None:
            return int(mode)
        r = region_index(model, self.x)
        if not isinstance(r, OnManifold):
            return r
        signs = np.where(model.gamma(self.x) < 0, -1, 1)
        decision = _select(model, self.x, r.manifolds, signs, None, ())
        if isinstance(decision, SlideTo):
            self.touching = frozenset()
            return SlidingRegime(decision.active, decision.signs, 0.0)
        self.touching = r.manifolds
        if isinstance(decision, GoTo):
            return decision.region
        return region_of_signs(signs)

    # error control

    def _err(self, x, coarse, fine):
        scale = self.cfg.atol + self.cfg.rtol * np.maximum(np.abs(x), np.abs(fine))
        return float(np.max(np.abs(fine - coarse) / scale)) / 3.0

    def _new_dt(self, dt, err):
        if not self.cfg.adaptive:
            return dt
        fac = GROW_MAX if err == 0 else min(GROW_MAX, max(GROW_MIN, SAFETY * err ** (-1.0 / 3.0)))
        return min(self.cfg.dt_max, max(self.cfg.dt_min, dt * fac))

    def _region_step(self, i, x, t, dt):
        if not self.cfg.adaptive:
            x1, dense = rk2_step(self.model, i, x, t, dt)
            return x1, 0.0, dense
        coarse, _ = rk2_step(self.model, i, x, t, dt)
        h1, _ = rk2_step(self.model, i, x, t, 0.5 * dt)
        h2, _ = rk2_step(self.model, i, h1, t + 0.5 * dt, 0.5 * dt)
        return h2, self._err(x, coarse, h2), DenseOutput(t, [0.0, 0.5 * dt, dt], [x, h1, h2])

    def _slide_step(self, reg, x, t, dt):
        if not self.cfg.adaptive:
            x1 = bathe_sliding_step(self.model, reg, x, t, dt, self.cfg)
            return x1, 0.0, DenseOutput.linear(t, dt, x, x1)
        f0 = _sliding_field(self.model, reg, x, self.cfg)
        coarse = bathe_sliding_step(self.model, reg, x, t, dt, self.cfg, f0)
        h1 = bathe_sliding_step(self.model, reg, x, t, 0.5 * dt, self.cfg, f0)
        h2 = bathe_sliding_step(self.model, reg, h1, t + 0.5 * dt, 0.5 * dt, self.cfg)
        return h2, self._err(x, coarse, h2), DenseOutput(t, [0.0, 0.5 * dt, dt], [x, h1, h2])

    def _shrink(self, why):
        if self.dt <= self.cfg.dt_min * (1 + 1e-12):
            raise NumericFailure(f"step size underflow ({why})", where=f"t={self.t}")
        self.dt = max(self.cfg.dt_min, 0.5 * self.dt)

    # main loop

    def run(self) -> SimTrace:
        cfg = self.cfg
        t_end = cfg.t_end
        while t_end - self.t > 1e-12 * max(1.0, abs(t_end)):
            self.steps += 1
            if self.steps > cfg.max_steps:
                raise NumericFailure("maximum number of steps exceeded", where=f"t={self.t}")
            dt = min(self.dt, t_end - self.t)
            last = dt == t_end - self.t
            try:
                if isinstance(self.mode, SlidingRegime):
                    self._advance_sliding(dt, last)
                else:
                    self._advance_region(dt, last)
            except NumericFailure as exc:
                logger.debug("step failure at t=%g: %s", self.t, exc)
                self._shrink(str(exc))
        return self.trace

    def _accept(self, x, dt, last):
        self.t = self.cfg.t_end if last else self.t + dt
        self.x = x
        if self.t <= self.trace.t[-1]:
            # zero-length landing: replace the sample instead of repeating its time
            self.trace.t.pop()
            self.trace.x.pop()
            self.trace.regime.pop()
        self.trace.add(self.t, self.x, self.label(self.mode))

    def _advance_region(self, dt, last) -> bool:
        model, cfg = self.model, self.cfg
        i = self.mode
        x0, t0 = self.x, self.t
        x1, err, dense = self._region_step(i, x0, t0, dt)
        if err > 1.0 and dt > cfg.dt_min:
            self.dt = self._new_dt(dt, err)
            return False
        s = signs_of_region(i, model.p)
        g1 = model.gamma(x1)
        bands = model.bands
        watch = [j for j in range(model.p) if j not in self.touching]
        crossed = [j for j in watch if s[j] * g1[j] < 0 and abs(g1[j]) > bands[j]]
        arrived = [j for j in watch if abs(g1[j]) <= bands[j]]
        new_dt = self._new_dt(dt, err)
        if crossed:
            try:
                rec = locate_switch_point(dense, model.gamma, crossed, cfg.eps_root)
            except NumericFailure:
                self._shrink("event location")
                return False
            sigma, on = rec.sigma, set(rec.manifolds)
            on |= {j for j in watch if abs(model.gamma(rec.x)[j]) <= bands[j]}
            return self._land_from_region(i, x0, t0, sigma, on, dt, new_dt)
        if arrived:
            return self._land_from_region(i, x0, t0, dt, set(arrived), dt, new_dt, x_end=x1, last=last)
        # leaving the manifolds we sat on; a flip right away means the side was misjudged
        flipped = [j for j in self.touching if s[j] * g1[j] < -bands[j]]
        self.touching = frozenset(j for j in self.touching if abs(g1[j]) <= bands[j])
        self.dt = new_dt
        self._accept(x1, dt, last)
        if flipped:
            new = region_of_signs(np.where(g1 < 0, -1, 1))
            self.event("Crossing", flipped, i, new, x1, self.t)
            self.mode = new
            self.trace.regime[-1] = self.label(new)
        self.graze_count = 0
        return True

    def _land_from_region(self, i, x0, t0, sigma, on, dt, new_dt, x_end=None, last=False):
        model, cfg = self.model, self.cfg
        if x_end is None:
            if sigma <= 0.0:
                xm = x0.copy()
            else:
                xm, _, _ = self._region_step(i, x0, t0, sigma)
        else:
            xm = x_end
        xm = project_to_manifold(model, xm, on, cfg.max_newton, cfg.eps_root)
        s = signs_of_region(i, model.p)
        decision = _select(model, xm, on, s, i, ())
        if not isinstance(decision, (SlideTo, GoTo)):
            if self.graze_count < cfg.grazing_retries:
                self.graze_count += 1
                self.dt = 0.5 * dt
                return False
            self.graze_count = 0
            self.dt = new_dt
            self._accept(xm, sigma, last and sigma == dt)
            self.event("Grazing", on, i, i, xm, self.t)
            self.touching = frozenset(on)
            return True
        self.graze_count = 0
        self.dt = new_dt
        self._accept(xm, sigma, last and sigma == dt)
        if isinstance(decision, SlideTo):
            reg = SlidingRegime(decision.active, decision.signs, self.t)
            kap = solve_kappa(model, xm, reg.active, reg.signs, check=False).kappas
            self.event("SlidingEntry", reg.active, i, reg, xm, self.t, list(kap))
            self.mode = reg
            self.touching = frozenset(j for j in on if j not in reg.active)
        else:
            self.event("Crossing", on, i, decision.region, xm, self.t)
            self.mode = decision.region
            self.touching = frozenset(on)
        self.trace.regime[-1] = self.label(self.mode)
        return True

    def _advance_sliding(self, dt, last) -> bool:
        model, cfg = self.model, self.cfg
        reg: SlidingRegime = self.mode
        x0, t0 = self.x, self.t
        x1, err, dense = self._slide_step(reg, x0, t0, dt)
        if err > 1.0 and dt > cfg.dt_min:
            self.dt = self._new_dt(dt, err)
            return False
        new_dt = self._new_dt(dt, err)
        s = np.array(reg.signs)
        g1 = model.gamma(x1)
        bands = model.bands
        watch = [j for j in range(model.p) if j not in reg.active and j not in self.touching]
        crossed = [j for j in watch if s[j] * g1[j] < 0 and abs(g1[j]) > bands[j]]
        arrived = [j for j in watch if abs(g1[j]) <= bands[j]]
        margin_end = regime_margin(model, x1, reg)
        exiting = margin_end <= cfg.eps_L

        sig_cross = None
        if crossed:
            sig_cross = locate_switch_point(dense, model.gamma, crossed, cfg.eps_root).sigma
        elif arrived:
            sig_cross = dt
        sig_exit = None
        if exiting:
            def g(sig):
                return regime_margin(model, dense(sig), reg)
            g0 = g(0.0)
            sig_exit = 0.0 if g0 <= 0 else (dt if margin_end > 0 else
                                             secant_root(g, 0.0, dt, g0, margin_end, cfg.eps_root))

        if sig_cross is None and sig_exit is None:
            self.dt = new_dt
            self._accept(x1, dt, last)
            self._log_sliding(reg, x1)
            flipped = [j for j in self.touching if s[j] * g1[j] < -bands[j]]
            self.touching = frozenset(j for j in self.touching if abs(g1[j]) <= bands[j])
            if flipped:
                # left a grazed manifold on the other side: the adjacent flows change
                s[flipped] = -s[flipped]
                new = SlidingRegime(reg.active, tuple(int(v) for v in s), self.t)
                self.event("RegimeChange", flipped, reg, new, x1, self.t)
                self.mode = new
                self.trace.regime[-1] = self.label(new)
            return True

        sigma = min(v for v in (sig_cross, sig_exit) if v is not None)
        if sigma >= dt:
            xm = x1
        elif sigma <= 0.0:
            xm = x0.copy()
        else:
            xm, _, _ = self._slide_step(reg, x0, t0, sigma)
        is_exit = sig_exit is not None and sigma == sig_exit
        if is_exit and 0.0 < sigma < dt:
            sigma, xm = self._refine_exit(reg, x0, t0, dt, sigma, xm)
        on = set(reg.active)
        if not is_exit:
            on |= {j for j in watch if abs(model.gamma(xm)[j]) <= max(bands[j], 1e-9)
                   or (j in crossed and abs(sigma - sig_cross) <= 1e-10 * dt)}
        xm = project_to_manifold(model, xm, on, cfg.max_newton, cfg.eps_root)
        self.dt = new_dt
        at_end = last and sigma >= dt
        if is_exit:
            kap = solve_kappa(model, xm, reg.active, reg.signs, check=False)
            decision = exit_monitor(model, xm, reg, lookahead=x1, eps_exit=cfg.eps_exit, eps=cfg.eps_L)
            if isinstance(decision, Continue):
                self._accept(x1, dt, last)
                self._log_sliding(reg, x1)
                return True
            self._accept(xm, sigma, at_end)
            self._log_sliding(reg, xm)
            if isinstance(decision, ExitTo):
                self.event("SlidingExit", reg.active, reg, decision.region, xm, self.t, list(kap.kappas))
                self.mode = decision.region
                self.touching = frozenset(reg.active)
            else:
                new = SlidingRegime(decision.active, decision.signs, self.t)
                self.event("RegimeChange", reg.active, reg, new, xm, self.t, list(kap.kappas))
                self.mode = new
                self.touching = frozenset(j for j in reg.active if j not in new.active)
            self.trace.regime[-1] = self.label(self.mode)
            return True

        # an inactive manifold was reached while sliding
        fs = _sliding_field(model, reg, xm, cfg)
        normals = np.array([float(np.dot(model.gradient(j, xm), fs)) for j in range(model.p)])
        decision = _select(model, xm, on, s, normals, reg.active)
        self._accept(xm, sigma, at_end)
        if isinstance(decision, SlideTo):
            new = SlidingRegime(decision.active, decision.signs, self.t)
            if new.active == reg.active and new.signs == reg.signs:
                self.touching = frozenset(on - set(reg.active))
                self._log_sliding(reg, xm)
                return True
            self.event("RegimeChange", on, reg, new, xm, self.t)
            self.mode = new
            self.touching = frozenset(j for j in on if j not in new.active)
        elif isinstance(decision, GoTo):
            self.event("SlidingExit", on, reg, decision.region, xm, self.t)
            self.mode = decision.region
            self.touching = frozenset(on)
        else:
            self.event("Grazing", on - set(reg.active), reg, reg, xm, self.t)
            self.touching = frozenset(on - set(reg.active))
            self._log_sliding(reg, xm)
        if isinstance(self.mode, SlidingRegime):
            self._log_sliding(self.mode, xm)
        self.trace.regime[-1] = self.label(self.mode)
        return True

    def _refine_exit(self, reg, x0, t0, dt, sigma, xm):
        """Exit root on the integrated motion rather than on the interpolant.

        Regula falsi (Illinois variant) on the regime margin of states
        obtained by stepping from ``x0``; returns the best point found.
        """
        model = self.model

        def g(sig):
            xs = x0.copy() if sig <= 0 else self._slide_step(reg, x0, t0, sig)[0]
            return regime_margin(model, xs, reg), xs

        gm, _ = g(sigma) if xm is None else (regime_margin(model, xm, reg), xm)
        lo, glo = 0.0, regime_margin(model, x0, reg)
        hi, ghi = dt, None
        best = (abs(gm), sigma, xm)
        if gm > 0:
            lo, glo = sigma, gm
            ghi, xs = g(hi)
            best = min(best, (abs(ghi), hi, xs), key=lambda b: b[0])
        else:
            hi, ghi = sigma, gm
        side = 0
        for _ in range(40):
            if best[0] <= 1e-15 or ghi > 0 or glo <= 0 or hi - lo <= 4e-16 * max(1.0, abs(t0)):
                break
            c = hi - ghi * (hi - lo) / (ghi - glo)
            if not lo < c < hi:
                c = 0.5 * (lo + hi)
            gc, xs = g(c)
            if abs(gc) < best[0]:
                best = (abs(gc), c, xs)
            if gc > 0:
                lo, glo = c, gc
                if side == 1:
                    ghi *= 0.5
                side = 1
            else:
                hi, ghi = c, gc
                if side == -1:
                    glo *= 0.5
                side = -1
        return best[1], best[2]

    def _log_sliding(self, reg, x):
        model, cfg = self.model, self.cfg
        fs, w = sliding_field_and_weights(model, x, reg, cfg.eps_slide)
        tang = max(abs(float(np.dot(model.gradient(j, x), fs))) for j in reg.active)
        gmax = max(abs(float(model.switching[j].value(x))) for j in reg.active)
        self.trace.sliding_log.append({"t": self.t, "regime": reg.label(model), "tangency": tang,
                                       "gamma": gmax, "method": w.method})
        self.trace.weight_log.append(np.array(w.weights))


def _select(model, x, on, signs, incoming, prefer):
    return select_regime(model, x, on, signs, incoming=incoming, prefer=prefer)


def simulate(model: HybridModel, x0, config: SimConfig | None = None, mode: Optional[Mode] = None) -> SimTrace:
    """Integrate ``model`` from ``x0`` over ``[0, config.t_end]``.

    ``mode`` optionally forces the initial region index or sliding regime.
    Raises :class:`SimulationFailed` (carrying the partial trace) when the
    step size underflows or a solver cannot recover.
    """
    cfg = config or SimConfig()
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (model.n,) or not np.all(np.isfinite(x0)):
        raise InvalidArgument(f"x0 must be a finite vector of length {model.n}")
    run = _Run(model, x0, cfg, mode)
    try:
        return run.run()
    except NumericFailure as exc:
        run.trace.status = "numeric-failure"
        run.trace.message = str(exc)
        raise SimulationFailed(str(exc), run.trace) from exc
