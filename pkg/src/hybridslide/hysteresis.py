"""Brute-force reference for sliding motion: relay switching with hysteresis.

Instead of computing a sliding vector field, the state is advanced with
tiny fixed midpoint steps and the active flow is swapped only when a
switching function has moved past the band ``delta`` on the wrong side.
The motion then chatters in a band of width about ``2*delta`` around the
sliding manifold and tracks the sliding solution with an error of order
``delta``.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgument
from .model import HybridModel, region_of_signs


def hysteresis_simulate(model: HybridModel, x0, t_end: float, delta: float, h: float,
                        t_eval=None, signs=None):
    """Chattering reference solution.

    Parameters
    ----------
    model : HybridModel
    x0 : array_like
        Initial state.
    t_end : float
        Final time.
    delta : float
        Hysteresis half-width in the units of the switching functions.
    h : float
        Fixed micro step; should be well below ``delta`` divided by the
        normal speed of the flows.
    t_eval : array_like, optional
        Sorted times at which the state is returned (linear interpolation
        between micro steps).  Defaults to ``[0, t_end]``.
    signs : sequence of +-1, optional
        Initial side of every switching function; defaults to the sign of
        ``gamma(x0)`` with zero counted as positive.

    Returns
    -------
    states : ndarray, shape (len(t_eval), n)
    n_switches : int
        Number of flow swaps.
    """
    if delta <= 0 or h <= 0 or t_end < 0:
        raise InvalidArgument("delta and h must be positive and t_end non-negative")
    x = np.asarray(x0, dtype=float).copy()
    t_eval = np.array([0.0, t_end] if t_eval is None else t_eval, dtype=float)
    if np.any(np.diff(t_eval) < 0) or t_eval[0] < 0 or t_eval[-1] > t_end * (1 + 1e-12):
        raise InvalidArgument("t_eval must be sorted within [0, t_end]")
    s = np.where(model.gamma(x) < 0, -1, 1) if signs is None else np.array(signs, dtype=int)
    flows = model.flows
    values = [sw.value for sw in model.switching]
    region = region_of_signs(s)
    out = np.empty((t_eval.size, x.size))
    k = 0
    t = 0.0
    n_steps = int(np.ceil(t_end / h - 1e-9))
    switches = 0
    while k < t_eval.size and t_eval[k] <= t:
        out[k] = x
        k += 1
    for step in range(n_steps):
        dt = min(h, t_end - t)
        f = flows[region]
        x_new = x + dt * f(x + 0.5 * dt * f(x))
        t_new = t_end if step == n_steps - 1 else t + dt
        while k < t_eval.size and t_eval[k] <= t_new:
            w = (t_eval[k] - t) / dt
            out[k] = (1 - w) * x + w * x_new
            k += 1
        x, t = x_new, t_new
        changed = False
        for j, v in enumerate(values):
            if s[j] * v(x) < -delta:
                s[j] = -s[j]
                changed = True
                switches += 1
        if changed:
            region = region_of_signs(s)
    out[k:] = x
    return out, switches
