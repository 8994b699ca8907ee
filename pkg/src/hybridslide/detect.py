"""Switch-point detection, localisation and classification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import NumericFailure
from .model import EPS_L, HybridModel, adjacent_regions, normal_projection_matrix, signs_of_region

EPS_ROOT = 1e-12
N_SECANT = 50
MERGE_TOL = 1e-10


class SignChanges(NamedTuple):
    crossed: frozenset
    touching: frozenset

    def __bool__(self):
        return bool(self.crossed or self.touching)


def detect_sign_changes(g_prev, g_next, band=1e-9) -> SignChanges:
    """Switching functions that changed sign, or landed in the band, over a step.

    An empty result means the step stayed inside one region.
    """
    g_prev = np.asarray(g_prev, dtype=float)
    g_next = np.asarray(g_next, dtype=float)
    band = np.broadcast_to(band, g_next.shape)
    crossed = frozenset(int(j) for j in np.flatnonzero(g_prev * g_next < 0))
    touching = frozenset(int(j) for j in np.flatnonzero(np.abs(g_next) <= band)) - crossed
    return SignChanges(crossed, touching)


class DenseOutput:
    """Piecewise-linear state interpolant over one step.

    ``sigmas`` are offsets from ``t0`` starting at 0 and ending at ``dt``.
    """

    def __init__(self, t0: float, sigmas: Sequence[float], states: Sequence[np.ndarray]):
        self.t0 = float(t0)
        self.sigmas = np.asarray(sigmas, dtype=float)
        self.states = np.asarray(states, dtype=float)

    @classmethod
    def linear(cls, t0, dt, x0, x1):
        return cls(t0, [0.0, dt], [x0, x1])

    @property
    def dt(self) -> float:
        return float(self.sigmas[-1])

    def __call__(self, sigma: float) -> np.ndarray:
        s = self.sigmas
        k = int(np.clip(np.searchsorted(s, sigma, side="right") - 1, 0, len(s) - 2))
        w = (sigma - s[k]) / (s[k + 1] - s[k])
        return (1.0 - w) * self.states[k] + w * self.states[k + 1]


@dataclass(frozen=True)
class CrossingRecord:
    manifolds: frozenset
    sigma: float
    x: np.ndarray
    t: float


def secant_root(g: Callable[[float], float], a: float, b: float, ga: float, gb: float,
                eps: float = EPS_ROOT, max_iter: int = N_SECANT) -> float:
    """Root of ``g`` in the bracket ``[a, b]``.

    Secant iterates are kept inside the bracket; after ``max_iter`` of them
    plain bisection takes over.
    """
    if abs(gb) <= eps:
        return b
    if abs(ga) <= eps:
        return a
    if ga * gb > 0:
        raise NumericFailure("root is not bracketed", where=f"[{a}, {b}]")
    lo, glo, hi, ghi = a, ga, b, gb
    x0, g0, x1, g1 = a, ga, b, gb
    for _ in range(max_iter):
        c = x1 - g1 * (x1 - x0) / (g1 - g0) if g1 != g0 else 0.5 * (lo + hi)
        if not lo < c < hi:
            c = 0.5 * (lo + hi)
        gc = g(c)
        if abs(gc) <= eps:
            return c
        if (gc < 0) == (glo < 0):
            lo, glo = c, gc
        else:
            hi, ghi = c, gc
        x0, g0, x1, g1 = x1, g1, c, gc
    while True:
        c = 0.5 * (lo + hi)
        if not lo < c < hi:
            break
        gc = g(c)
        if abs(gc) <= eps:
            return c
        if (gc < 0) == (glo < 0):
            lo, glo = c, gc
        else:
            hi, ghi = c, gc
    best, gbest = (lo, glo) if abs(glo) < abs(ghi) else (hi, ghi)
    raise NumericFailure("bisection could not reach the root tolerance",
                         where=f"sigma={best}", residual=abs(gbest))


def locate_switch_point(dense: DenseOutput, gamma: Callable[[np.ndarray], np.ndarray],
                        manifolds: Iterable[int], eps_root: float = EPS_ROOT,
                        max_iter: int = N_SECANT, merge_tol: float = MERGE_TOL) -> CrossingRecord:
    """Earliest zero of the listed switching functions along ``dense``.

    Roots closer than ``merge_tol * dt`` to the earliest one are reported
    together, which is how simultaneous hits of an intersection show up.
    """
    dt = dense.dt
    g0 = gamma(dense(0.0))
    g1 = gamma(dense(dt))
    roots = {}
    for j in manifolds:
        roots[j] = secant_root(lambda s, j=j: float(gamma(dense(s))[j]), 0.0, dt,
                               float(g0[j]), float(g1[j]), eps_root, max_iter)
    if not roots:
        raise NumericFailure("no manifold to locate")
    sigma = min(roots.values())
    hit = frozenset(j for j, s in roots.items() if s - sigma <= merge_tol * dt)
    x = dense(sigma)
    return CrossingRecord(hit, sigma, x, dense.t0 + sigma)


@dataclass(frozen=True)
class Transversal:
    target: int


@dataclass(frozen=True)
class AttractiveSliding:
    active: frozenset


@dataclass(frozen=True)
class Grazing:
    manifold: int


@dataclass(frozen=True)
class Mixed:
    """Non-degenerate signs that are neither attractive nor a clean pass."""

    failing: frozenset


def default_signs(model: HybridModel, x) -> np.ndarray:
    g = model.gamma(x)
    return np.where(g < 0, -1, 1)


def incoming_normals(model: HybridModel, x, incoming) -> Optional[np.ndarray]:
    """Normal components of the incoming motion for every manifold."""
    if incoming is None:
        return None
    if isinstance(incoming, (int, np.integer)):
        return normal_projection_matrix(model, x, [int(incoming)])[0]
    return np.asarray(incoming, dtype=float)


def classify_switch_point(model: HybridModel, x, active: Iterable[int], signs=None,
                          incoming=None, eps: float = EPS_L):
    """Decide how the motion continues at a point on the ``active`` manifolds.

    ``signs`` fixes the side of the inactive manifolds (defaults to the signs
    of ``gamma(x)``).  ``incoming`` is the region the trajectory arrives from,
    or directly the normal components of the arriving vector field.

    Returns :class:`AttractiveSliding` when every adjacent flow points
    toward the intersection, :class:`Transversal` when a region's own flow
    leads away on the side the arriving motion points to, :class:`Grazing`
    when a needed normal component vanishes to within ``eps``, and
    :class:`Mixed` otherwise.
    """
    active = sorted(int(j) for j in active)
    x = np.asarray(x, dtype=float)
    signs = default_signs(model, x) if signs is None else np.asarray(signs)
    regions = adjacent_regions(model.p, active, signs)
    F = normal_projection_matrix(model, x, regions)[:, active]
    psi = model.sign_matrix[active][:, regions].T  # row per adjacent region

    small = np.abs(F) <= eps
    if small.any():
        return Grazing(active[int(np.argwhere(small)[0][1])])
    sF = np.sign(F)
    if np.all(sF == -psi):
        return AttractiveSliding(frozenset(active))

    own = np.all(sF == psi, axis=1)
    inc = incoming_normals(model, x, incoming)
    if inc is not None:
        inc = inc[active]
        if np.any(np.abs(inc) <= eps):
            return Grazing(active[int(np.argmin(np.abs(inc)))])
        want = np.sign(inc)
        for r, region in enumerate(regions):
            if own[r] and np.all(psi[r] == want):
                return Transversal(region)
    else:
        cands = [regions[r] for r in np.flatnonzero(own)]
        if len(cands) == 1:
            return Transversal(cands[0])
        if len(cands) > 1:
            # repelling intersection: no side is preferred
            return Grazing(active[0])
    failing = frozenset(active[c] for c in range(len(active)) if np.any(sF[:, c] != -psi[:, c]))
    return Mixed(failing)


def region_signs(model: HybridModel, region: int) -> np.ndarray:
    return signs_of_region(region, model.p)
