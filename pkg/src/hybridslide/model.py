"""Hybrid models: flow maps, switching functions and their geometry.

A model with ``p`` switching functions partitions the state space into
``2**p`` regions.  Region ``i`` (0-based) is the column ``i`` of the sign
matrix: switching function ``j`` is positive in region ``i`` iff bit ``j``
of ``i`` is set.  Flows must be registered in that column order.

All indices in this package (regions, switching functions) are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidArgument, NumericFailure

P_MAX = 8
EPS_GAMMA = 1e-9
EPS_L = 1e-9

Vector = np.ndarray
ScalarField = Callable[[Vector], float]
VectorField = Callable[[Vector], Vector]


def build_sign_matrix(p: int, p_max: int = P_MAX) -> np.ndarray:
    """Return the ``(p, 2**p)`` matrix of region signs.

    Row ``j`` is made of ``2**(p-j-1)`` blocks of ``2**j`` entries -1
    followed by ``2**j`` entries +1, so column ``i`` holds the binary
    expansion of ``i`` written with -1/+1 digits (least significant bit in
    row 0).

    >>> build_sign_matrix(2)
    array([[-1,  1, -1,  1],
           [-1, -1,  1,  1]])
    """
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
        raise InvalidArgument(f"p must be an integer, got {p!r}")
    if p < 1 or p > p_max:
        raise InvalidArgument(f"p must lie in [1, {p_max}], got {p}")
    cols = np.arange(2**p)
    bits = (cols[None, :] >> np.arange(p)[:, None]) & 1
    return (2 * bits - 1).astype(int)


def region_of_signs(signs: Sequence[int]) -> int:
    """Column index of the sign matrix matching ``signs`` (entries +-1)."""
    return int(sum(1 << j for j, s in enumerate(signs) if s > 0))


def signs_of_region(region: int, p: int) -> np.ndarray:
    return np.array([1 if (region >> j) & 1 else -1 for j in range(p)])


def adjacent_regions(p: int, active: Sequence[int], signs: Sequence[int]) -> list[int]:
    """Regions bordering the intersection of the ``active`` manifolds.

    Manifolds outside ``active`` keep the sign given in ``signs``; the
    ``2**len(active)`` returned regions are ordered like the columns of the
    sign matrix restricted to ``active``.
    """
    active = sorted(active)
    base = [1 if s > 0 else -1 for s in signs]
    out = []
    for k in range(2 ** len(active)):
        s = list(base)
        for b, j in enumerate(active):
            s[j] = 1 if (k >> b) & 1 else -1
        out.append(region_of_signs(s))
    return out


@dataclass(frozen=True)
class SwitchingFunction:
    """Scalar switching function whose zero set is a switching manifold.

    ``gradient`` and ``hessian`` are optional; central finite differences
    are used when they are missing.  ``band`` is the on-manifold tolerance
    in the units of the function value.
    """

    name: str
    value: ScalarField
    gradient: Optional[VectorField] = None
    hessian: Optional[Callable[[Vector], np.ndarray]] = None
    band: float = EPS_GAMMA


@dataclass(frozen=True)
class OnManifold:
    """Returned by :func:`region_index` when the state sits on manifolds."""

    manifolds: frozenset


@dataclass(frozen=True, eq=False)
class HybridModel:
    """Immutable piecewise-smooth model.

    Parameters
    ----------
    switching : sequence of SwitchingFunction
        The ``p`` switching functions.
    flows : sequence of callables
        ``2**p`` vector fields, flow ``i`` active in region ``i``.
    state_names : sequence of str
        Labels of the ``n`` state entries.
    region_names : sequence of str, optional
        Labels of the regions, defaults to ``"r0", "r1", ...``.
    clock_index : int, optional
        Index of the adjoined clock state (derivative 1 in every flow).
    """

    switching: tuple
    flows: tuple
    state_names: tuple
    region_names: tuple = ()
    clock_index: Optional[int] = None
    name: str = ""
    sign_matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        sw = tuple(self.switching)
        fl = tuple(self.flows)
        names = tuple(self.state_names)
        p = len(sw)
        if p < 1:
            raise InvalidArgument("a model needs at least one switching function")
        psi = build_sign_matrix(p)
        if len(fl) != 2**p:
            raise InvalidArgument(f"expected {2**p} flows for p={p}, got {len(fl)}")
        regions = tuple(self.region_names) or tuple(f"r{i}" for i in range(2**p))
        if len(regions) != 2**p:
            raise InvalidArgument("region_names must have one label per flow")
        if len(set(s.name for s in sw)) != p:
            raise InvalidArgument("switching function names must be unique")
        if self.clock_index is not None and not 0 <= self.clock_index < len(names):
            raise InvalidArgument("clock_index out of range")
        psi.setflags(write=False)
        object.__setattr__(self, "switching", sw)
        object.__setattr__(self, "flows", fl)
        object.__setattr__(self, "state_names", names)
        object.__setattr__(self, "region_names", regions)
        object.__setattr__(self, "sign_matrix", psi)

    @property
    def n(self) -> int:
        return len(self.state_names)

    @property
    def p(self) -> int:
        return len(self.switching)

    @property
    def bands(self) -> np.ndarray:
        return np.array([s.band for s in self.switching])

    def manifold_index(self, name: str) -> int:
        for j, s in enumerate(self.switching):
            if s.name == name:
                return j
        raise InvalidArgument(f"unknown switching function {name!r}")

    def gamma(self, x: Vector) -> np.ndarray:
        return np.array([s.value(x) for s in self.switching], dtype=float)

    def flow(self, i: int, x: Vector) -> np.ndarray:
        return np.asarray(self.flows[i](x), dtype=float)

    def gradient(self, j: int, x: Vector) -> np.ndarray:
        sw = self.switching[j]
        if sw.gradient is not None:
            g = np.asarray(sw.gradient(x), dtype=float)
        else:
            g = fd_gradient(sw.value, x)
        if not np.all(np.isfinite(g)):
            raise NumericFailure("non-finite gradient", where=f"switching {sw.name} at x={x}")
        return g

    def hessian(self, j: int, x: Vector) -> np.ndarray:
        sw = self.switching[j]
        if sw.hessian is not None:
            return np.asarray(sw.hessian(x), dtype=float)
        # differences of a differenced gradient need the wider step
        return fd_jacobian(lambda y: self.gradient(j, y), x, rel=1e-4)


def fd_step(x: Vector, rel: float = 6e-6) -> np.ndarray:
    # default balances truncation and rounding of a central difference
    return rel * np.maximum(1.0, np.abs(x))


def fd_gradient(fun: ScalarField, x: Vector) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    h = fd_step(x)
    g = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h[k]
        g[k] = (fun(x + e) - fun(x - e)) / (2 * h[k])
    return g


def fd_jacobian(fun: VectorField, x: Vector, rel: float = 6e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    h = fd_step(x, rel)
    cols = []
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h[k]
        cols.append((np.asarray(fun(x + e)) - np.asarray(fun(x - e))) / (2 * h[k]))
    return np.column_stack(cols)


def region_index(model: HybridModel, x: Vector):
    """Region containing ``x`` or an :class:`OnManifold` marker.

    The marker lists every switching function with ``|gamma_j(x)| <= band``.
    """
    g = model.gamma(x)
    on = frozenset(int(j) for j in np.flatnonzero(np.abs(g) <= model.bands))
    if on:
        return OnManifold(on)
    return region_of_signs(np.sign(g))


def _normal_component(grad: np.ndarray, f: np.ndarray) -> float:
    # shared by lie_derivative and normal_projection_matrix so both agree bitwise
    return float(np.dot(grad, f))


def lie_derivative(model: HybridModel, i: int, j: int, x: Vector, k: int = 1) -> float:
    """k-th Lie derivative of switching function ``j`` along flow ``i``.

    Orders above one are obtained by central differences of the previous
    order along the direction ``f_i(x)``.
    """
    if k < 0:
        raise InvalidArgument("order k must be non-negative")
    x = np.asarray(x, dtype=float)
    if k == 0:
        return float(model.switching[j].value(x))
    if k == 1:
        return _normal_component(model.gradient(j, x), model.flow(i, x))
    f = model.flow(i, x)
    nf = float(np.linalg.norm(f))
    if nf == 0.0:
        return 0.0
    # nested differences lose accuracy fast; widen the step with the order
    s = (1e-16) ** (1.0 / (k + 2)) * max(1.0, float(np.linalg.norm(x))) / nf
    lo = lie_derivative(model, i, j, x - s * f, k - 1)
    hi = lie_derivative(model, i, j, x + s * f, k - 1)
    val = (hi - lo) / (2 * s)
    if not np.isfinite(val):
        raise NumericFailure("non-finite Lie derivative", where=f"flow {i}, switching {j}, order {k}")
    return val


def relative_degree(model: HybridModel, i: int, j: int, x: Vector, k_max: int, eps: float = EPS_L):
    """Smallest order whose Lie derivative is nonzero, or None past ``k_max``."""
    if k_max < 1:
        raise InvalidArgument("k_max must be at least 1")
    for k in range(k_max + 1):
        if abs(lie_derivative(model, i, j, x, k)) > eps:
            return k
    return None


def normal_projection_matrix(model: HybridModel, x: Vector, regions: Sequence[int] | None = None) -> np.ndarray:
    """Matrix of first Lie derivatives, row per region, column per manifold.

    With ``regions`` given only those rows are evaluated (in that order).
    """
    x = np.asarray(x, dtype=float)
    rows = range(2**model.p) if regions is None else regions
    grads = [model.gradient(j, x) for j in range(model.p)]
    out = np.empty((len(rows), model.p))
    for r, i in enumerate(rows):
        f = model.flow(i, x)
        for j, g in enumerate(grads):
            out[r, j] = _normal_component(g, f)
    return out
