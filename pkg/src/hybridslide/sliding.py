"""Convexified sliding dynamics on switching manifolds and their intersections.

On the intersection of the active manifolds ``J`` the motion follows a
convex combination of the ``2**|J|`` adjacent flows.  With one weight
parameter ``alpha_j`` per active manifold the weight of the adjacent
region with local sign column ``psi`` is

    prod_j (1 + 2 psi_j alpha_j - psi_j) / 2

and the ``alpha`` are fixed by requiring the combined field to be tangent
to every active manifold.  A second, closed-form set of weights (the
``kappa`` coefficients) is available as well; it sums to one by
construction and signals when a single flow takes over.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Optional, Sequence

import numpy as np

from .detect import AttractiveSliding, Grazing, Transversal, classify_switch_point, incoming_normals
from .errors import NumericFailure, PreconditionViolation
from .model import EPS_L, HybridModel, adjacent_regions, build_sign_matrix, normal_projection_matrix

EPS_SLIDE = 1e-12
EPS_DEN = 1e-14
EPS_EXIT = 1e-6
N_FP = 200


@dataclass(frozen=True)
class SlidingRegime:
    """Active manifold set plus the frozen sides of the inactive manifolds."""

    active: frozenset
    signs: tuple
    entered_at: float = 0.0

    def adjacent_flows(self, p: int) -> list[int]:
        return list(_adjacent(p, tuple(sorted(self.active)), tuple(int(v) for v in self.signs)))

    def label(self, model: HybridModel) -> str:
        names = ",".join(model.switching[j].name for j in sorted(self.active))
        sides = "".join(f"{model.switching[j].name}{'+' if self.signs[j] > 0 else '-'}"
                        for j in range(model.p) if j not in self.active)
        return f"slide{{{names}}}" + (f"[{sides}]" if sides else "")


@dataclass
class ConvexWeights:
    """Weights of the flows adjacent to an active set.

    ``regions`` lists the adjacent regions in local sign-matrix order and
    ``residual`` is the largest normal component of the combined field on
    the active manifolds.
    """

    weights: np.ndarray
    regions: list
    method: str
    alphas: Optional[np.ndarray] = None
    kappas: Optional[np.ndarray] = None
    residual: float = float("nan")


@lru_cache(maxsize=None)
def _psi(m: int) -> np.ndarray:
    return build_sign_matrix(m)


@lru_cache(maxsize=4096)
def _adjacent(p: int, active: tuple, signs: tuple) -> tuple:
    return tuple(adjacent_regions(p, active, signs))


def _local_setup(model, x, active, signs, F):
    active = sorted(int(j) for j in active)
    if signs is None:
        signs = np.where(model.gamma(x) < 0, -1, 1)
    regions = list(_adjacent(model.p, tuple(active), tuple(int(v) for v in signs)))
    if F is None:
        F = normal_projection_matrix(model, x, regions)[:, active]
    return active, regions, np.asarray(F, dtype=float)


def alpha_weights(alphas: np.ndarray) -> np.ndarray:
    """Product weights of all ``2**m`` local regions for parameters ``alphas``."""
    m = len(alphas)
    psi = _psi(m) if m else np.zeros((0, 1), dtype=int)
    a = np.asarray(alphas, dtype=float)[:, None]
    return np.prod((1 + 2 * psi * a - psi) / 2, axis=0)


def _residual(weights, F):
    return weights @ F


def solve_alpha(model: HybridModel, x, active: Iterable[int], signs=None, F=None,
                eps: float = EPS_SLIDE, max_sweeps: int = N_FP, eps_den: float = EPS_DEN) -> ConvexWeights:
    """Tangency parameters by Gauss-Seidel sweeps.

    Each sweep updates ``alpha_j <- W1 / (W1 - W2)`` where ``W1`` (``W2``)
    collects the normal components along manifold ``j`` of the adjacent
    flows on its negative (positive) side, weighted by the current
    parameters of the other manifolds.
    """
    active, regions, F = _local_setup(model, x, active, signs, F)
    m = len(active)
    if m == 1:
        den = F[0, 0] - F[1, 0]
        if abs(den) < eps_den:
            raise NumericFailure("vanishing denominator in alpha update", where=f"manifold {active[0]}")
        a = F[0, 0] / den
        w = np.array([1.0 - a, a])
        res = abs(float(w @ F[:, 0]))
        if res <= eps:
            return ConvexWeights(w, regions, "alpha", alphas=np.array([a]), residual=res)
        raise NumericFailure("alpha fixed point did not converge", residual=res)
    psi = _psi(m)
    alphas = np.full(m, 0.5)
    res = np.inf
    for _ in range(max_sweeps):
        for b in range(m):
            other = np.ones(len(regions))
            for c in range(m):
                if c != b:
                    other *= np.where(psi[c] > 0, alphas[c], 1.0 - alphas[c])
            w1 = float(np.sum((other * F[:, b])[psi[b] < 0]))
            w2 = float(np.sum((other * F[:, b])[psi[b] > 0]))
            den = w1 - w2
            if abs(den) < eps_den:
                raise NumericFailure("vanishing denominator in alpha update", where=f"manifold {active[b]}")
            alphas[b] = w1 / den
        w = alpha_weights(alphas)
        res = float(np.max(np.abs(_residual(w, F))))
        if res <= eps:
            return ConvexWeights(w, regions, "alpha", alphas=alphas.copy(), residual=res)
    raise NumericFailure("alpha fixed point did not converge", residual=res)


def solve_alpha_newton(model: HybridModel, x, active, signs=None, F=None, eps: float = EPS_SLIDE,
                       max_iter: int = 50) -> ConvexWeights:
    """Damped Newton on the tangency residual, parameters clipped to [0, 1]."""
    active, regions, F = _local_setup(model, x, active, signs, F)
    m = len(active)
    psi = _psi(m)
    alphas = np.full(m, 0.5)

    def resid(a):
        return _residual(alpha_weights(a), F)

    r = resid(alphas)
    for _ in range(max_iter):
        if np.max(np.abs(r)) <= eps:
            return ConvexWeights(alpha_weights(alphas), regions, "newton", alphas=alphas.copy(),
                                 residual=float(np.max(np.abs(r))))
        J = np.empty((m, m))
        for c in range(m):
            # d/d alpha_c of each product weight
            dw = psi[c].astype(float)
            for d in range(m):
                if d != c:
                    dw = dw * np.where(psi[d] > 0, alphas[d], 1.0 - alphas[d])
            J[:, c] = dw @ F
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise NumericFailure("singular tangency Jacobian") from exc
        lam = 1.0
        norm0 = np.linalg.norm(r)
        while True:
            trial = np.clip(alphas + lam * step, 0.0, 1.0)
            rt = resid(trial)
            if np.linalg.norm(rt) < norm0:
                break
            lam *= 0.5
            if lam < 1e-4:
                raise NumericFailure("Newton on tangency residual stalled", residual=float(norm0))
        alphas, r = trial, rt
    raise NumericFailure("Newton on tangency residual did not converge", residual=float(np.max(np.abs(r))))


def solve_alpha_pair(model: HybridModel, x, active, signs=None, F=None, eps: float = EPS_SLIDE) -> ConvexWeights:
    """Exact tangency parameters on the intersection of two manifolds.

    Both tangency conditions are bilinear in ``(a, b)``; eliminating ``a``
    leaves a quadratic in ``b``.  The root with both parameters in [0, 1]
    is returned (the one nearest the centre if there are two); parameters
    up to 0.25 outside that range are tolerated so that a step may straddle
    an exit point.
    """
    active, regions, F = _local_setup(model, x, active, signs, F)
    if len(active) != 2:
        raise NumericFailure("the pair solver needs exactly two active manifolds")
    (f00, f01), (f10, f11), (f20, f21), (f30, f31) = F.tolist()
    d0 = f00 - f10 - f20 + f30
    d1 = f01 - f11 - f21 + f31
    # P_c(b) + a Q_c(b) = 0 with P_c = f0c + b (f2c - f0c), Q_c = (f1c - f0c) + b d_c
    p0, p0b = f00, f20 - f00
    q0, q0b = f10 - f00, d0
    p1, p1b = f01, f21 - f01
    q1, q1b = f11 - f01, d1
    # P1 Q0 - P0 Q1 = c2 b^2 + c1 b + c0
    c2 = p1b * q0b - p0b * q1b
    c1 = p1 * q0b + p1b * q0 - p0 * q1b - p0b * q1
    c0 = p1 * q0 - p0 * q1
    if abs(c2) > EPS_DEN * max(abs(c1), abs(c0), 1.0):
        disc = c1 * c1 - 4 * c2 * c0
        if disc < 0:
            raise NumericFailure("no real tangency parameters")
        sq = np.sqrt(disc)
        # numerically stable pair of roots
        qq = -0.5 * (c1 + np.copysign(sq, c1))
        roots = [qq / c2] + ([c0 / qq] if qq != 0 else [])
    elif abs(c1) > 0:
        roots = [-c0 / c1]
    else:
        raise NumericFailure("degenerate tangency system")
    # slightly out-of-range parameters are kept so a step can straddle an
    # exit point; the exit monitor decides what happens there
    tol = 0.25
    found = []
    for b in roots:
        qa, pa = q0 + b * q0b, p0 + b * p0b
        if abs(qa) < EPS_DEN:
            qa, pa = q1 + b * q1b, p1 + b * p1b
            if abs(qa) < EPS_DEN:
                continue
        a = -pa / qa
        if -tol <= a <= 1 + tol and -tol <= b <= 1 + tol:
            found.append((abs(a - 0.5) + abs(b - 0.5), a, b))
    if not found:
        raise NumericFailure("tangency parameters outside [0, 1]")
    _, a, b = min(found)
    alphas = np.array([a, b])
    w = alpha_weights(alphas)
    res = float(np.max(np.abs(_residual(w, F))))
    if res > eps:
        raise NumericFailure("pair solution misses the tangency tolerance", residual=res)
    return ConvexWeights(w, regions, "alpha", alphas=alphas, residual=res)


def _signed_root(v: float, order: int) -> float:
    return float(np.sign(v) * abs(v) ** (1.0 / order))


def solve_kappa(model: HybridModel, x, active, signs=None, F=None, check: bool = True,
                eps: float = EPS_L) -> ConvexWeights:
    """Closed-form rational weights.

    The first adjacent flow gets sign vector ``+sgn(F)`` and the others
    ``-sgn(F)``, so ``omega[0] >= 0`` and ``omega[k] <= 0``.  Each kappa
    uses the signed real ``(N-1)``-th root of the product of the other
    omegas; ``N - 1`` is always odd.
    """
    active, regions, F = _local_setup(model, x, active, signs, F)
    m = len(active)
    N = 2**m
    if check:
        psi = _psi(m).T
        if np.any(np.sign(F) * psi > 0) and np.any(np.abs(F)[np.sign(F) * psi > 0] > eps):
            raise PreconditionViolation("adjacent flows are not attractive; kappa weights undefined")
    b = -np.sign(F)
    b[0] = np.sign(F[0])
    omega = np.sum(b * F, axis=1)
    kappas = np.empty(N)
    for i in range(N):
        root = _signed_root(float(np.prod(np.delete(omega, i))), N - 1)
        den = root - omega[i]
        if den == 0.0:
            kappas[i] = 1.0 if omega[i] == 0.0 else 0.0
        else:
            kappas[i] = root / den
    total = float(kappas.sum())
    if not total > 0:
        raise NumericFailure("kappa coefficients sum to zero")
    w = kappas / total
    res = float(np.max(np.abs(_residual(w, F))))
    return ConvexWeights(w, regions, "kappa", kappas=kappas, residual=res)


def sliding_weights(model: HybridModel, x, active, signs=None, F=None, eps: float = EPS_SLIDE,
                    with_kappa: bool = False) -> ConvexWeights:
    """Tangent convex weights of the flows adjacent to ``active``.

    One or two active manifolds have closed forms.  Otherwise Newton on the
    tangency residual runs first (it needs far fewer evaluations than the
    Gauss-Seidel sweeps), then the sweeps, then the kappa weights, which are
    only accepted when they meet the tangency tolerance.  ``with_kappa``
    attaches the kappa coefficients to the result whatever produced it.
    """
    active, regions, F = _local_setup(model, x, active, signs, F)
    kap = None
    if len(active) == 1:
        out = solve_alpha(model, x, active, signs, F=F, eps=eps)
    else:
        try:
            if len(active) == 2:
                # exact: no other solver can find parameters this one misses
                out = solve_alpha_pair(model, x, active, signs, F=F, eps=eps)
            else:
                try:
                    out = solve_alpha_newton(model, x, active, signs, F=F, eps=eps)
                except NumericFailure:
                    out = solve_alpha(model, x, active, signs, F=F, eps=eps)
        except NumericFailure:
            kap = solve_kappa(model, x, active, signs, F=F, check=False)
            if kap.residual > eps:
                raise
            return kap
    if with_kappa:
        kap = kap or solve_kappa(model, x, active, signs, F=F, check=False)
        out.kappas = kap.kappas
    return out


def sliding_field_and_weights(model: HybridModel, x, regime: SlidingRegime, eps: float = EPS_SLIDE):
    """Sliding vector field together with the weights that produced it."""
    x = np.asarray(x, dtype=float)
    active = sorted(regime.active)
    regions = regime.adjacent_flows(model.p)
    flows = np.array([model.flow(i, x) for i in regions])
    grads = np.array([model.gradient(j, x) for j in active])
    w = sliding_weights(model, x, active, regime.signs, F=flows @ grads.T, eps=eps)
    return w.weights @ flows, w


def sliding_vector_field(model: HybridModel, x, regime: SlidingRegime, weights: ConvexWeights | None = None) -> np.ndarray:
    """Convex combination of the adjacent flows tangent to the active set."""
    x = np.asarray(x, dtype=float)
    if weights is None:
        return sliding_field_and_weights(model, x, regime)[0]
    out = np.zeros(model.n)
    for w, i in zip(weights.weights, weights.regions):
        out += w * model.flow(i, x)
    return out


@dataclass(frozen=True)
class SlideTo:
    active: frozenset
    signs: tuple


@dataclass(frozen=True)
class GoTo:
    region: int


def _side_orders(rest: Sequence[int], preferred: Optional[np.ndarray]):
    combos = list(product((-1, 1), repeat=len(rest)))
    if preferred is not None:
        want = tuple(1 if preferred[j] > 0 else -1 for j in rest)
        combos.sort(key=lambda c: c != want)
    return combos


def select_regime(model: HybridModel, x, on: Iterable[int], signs, incoming=None,
                  prefer: Iterable[int] = (), eps: float = EPS_L, exclude: Iterable[frozenset] = ()):
    """Pick the motion at a point lying on the manifolds ``on``.

    Sliding on the largest attractive subset wins; among equal sizes the
    subsets sharing most manifolds with ``prefer`` come first.  For the
    manifolds left out, the sliding field must point to the chosen side.
    Otherwise a transversal target region is returned, or Grazing.
    """
    x = np.asarray(x, dtype=float)
    on = sorted(int(j) for j in on)
    signs = np.array(signs, dtype=int)
    prefer = set(prefer)
    exclude = set(frozenset(e) for e in exclude)
    inc = incoming_normals(model, x, incoming)
    for size in range(len(on), 0, -1):
        subsets = sorted(combinations(on, size), key=lambda S: -len(prefer & set(S)))
        for S in subsets:
            if frozenset(S) in exclude:
                continue
            rest = [j for j in on if j not in S]
            for side in _side_orders(rest, inc):
                s = signs.copy()
                s[rest] = side
                cls = classify_switch_point(model, x, S, s, eps=eps)
                if not isinstance(cls, AttractiveSliding) and not (
                        len(S) > 1 and nested_margin(model, x, S, s) > eps):
                    continue
                if rest:
                    reg = SlidingRegime(frozenset(S), tuple(int(v) for v in s))
                    fs = sliding_vector_field(model, x, reg)
                    normals = np.array([float(np.dot(model.gradient(j, x), fs)) for j in rest])
                    if np.any(np.abs(normals) <= eps) or np.any(np.sign(normals) != np.array(side)):
                        continue
                return SlideTo(frozenset(S), tuple(int(v) for v in s))
    cls = classify_switch_point(model, x, on, signs, incoming=incoming, eps=eps)
    if isinstance(cls, Transversal):
        return GoTo(cls.target)
    if incoming is not None:
        cls2 = classify_switch_point(model, x, on, signs, incoming=None, eps=eps)
        if isinstance(cls2, Transversal):
            return GoTo(cls2.target)
    if isinstance(cls, Grazing):
        return cls
    return Grazing(on[0])


@dataclass(frozen=True)
class Continue:
    pass


@dataclass(frozen=True)
class ExitTo:
    region: int


@dataclass(frozen=True)
class ReduceTo:
    active: frozenset
    signs: tuple


def attractivity_margins(model: HybridModel, x, regime: SlidingRegime) -> np.ndarray:
    """``-psi * F`` over adjacent flows and active manifolds; positive = attractive."""
    active = sorted(regime.active)
    regions = regime.adjacent_flows(model.p)
    F = normal_projection_matrix(model, x, regions)[:, active]
    psi = model.sign_matrix[active][:, regions].T
    return -psi * F


def nested_margin(model: HybridModel, x, active, signs) -> float:
    """Attractivity of an intersection through the sliding motions around it.

    Manifold ``j`` qualifies when, on both of its sides, the sliding motion
    on the remaining active manifolds is itself attractive and points toward
    ``j``.  The margin of ``j`` is the smallest of those quantities and the
    result is the best margin over the active manifolds; positive means
    attractive.  This catches intersections where some adjacent flow points
    away from a manifold while the lower-dimensional sliding motions still
    converge onto the intersection.
    """
    active = sorted(int(j) for j in active)
    x = np.asarray(x, dtype=float)
    best = -np.inf
    for j in active:
        rest = [k for k in active if k != j]
        g = model.gradient(j, x)
        out = np.inf
        for side in (-1, 1):
            s = np.array(signs, dtype=int)
            s[j] = side
            sub = SlidingRegime(frozenset(rest), tuple(int(v) for v in s))
            out = min(out, regime_margin(model, x, sub))
            if out <= best:
                break
            try:
                fs = sliding_vector_field(model, x, sub)
            except NumericFailure:
                out = -np.inf
                break
            out = min(out, -side * float(np.dot(g, fs)))
        best = max(best, out)
    return best


def regime_margin(model: HybridModel, x, regime: SlidingRegime) -> float:
    """Scalar attractivity of a regime; the regime is valid while it is positive."""
    lemma = float(np.min(attractivity_margins(model, x, regime)))
    if lemma > 0 or len(regime.active) < 2:
        return lemma
    return max(lemma, nested_margin(model, x, regime.active, regime.signs))


def exit_monitor(model: HybridModel, x, regime: SlidingRegime, lookahead=None,
                 eps_exit: float = EPS_EXIT, eps: float = EPS_L):
    """Decide whether sliding on ``regime`` continues at ``x``.

    Sign information is read at ``lookahead`` when given (a state slightly
    past ``x`` along the motion), since at a located exit point the
    decisive normal component is zero.
    """
    xs = x if lookahead is None else lookahead
    if regime_margin(model, xs, regime) > eps:
        return Continue()
    margins = attractivity_margins(model, xs, regime)
    kap = solve_kappa(model, x, regime.active, regime.signs, check=False)
    i = int(np.argmax(kap.kappas))
    if kap.kappas[i] >= 1 - eps_exit and np.all(margins[i] <= 0):
        # a single flow has taken over and leads away from every active manifold
        return ExitTo(kap.regions[i])
    decision = select_regime(model, xs, regime.active, regime.signs, prefer=regime.active,
                             eps=eps, exclude=[regime.active])
    if isinstance(decision, SlideTo):
        return ReduceTo(decision.active, decision.signs)
    if isinstance(decision, GoTo):
        return ExitTo(decision.region)
    return Continue()
