"""Frequency selection: heuristic roots, greedy sequential search, multistart descent.

All searches minimise the profile residual (see
:func:`fourierpulse.synthesis.residual_functional`) with the amplitudes
re-solved by least squares at every evaluation, so only the frequencies are
free parameters. Derivatives are central differences.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from .records import DesignRecord, Method, Selection
from .synthesis import (
    BasisSpec,
    IllConditionedError,
    TargetProfile,
    _solve,
    gram_matrix,
    gram_solve,
    hamiltonian_state_error,
    projection_vector,
    target_norm_sq,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchOptions:
    fd_step: float = 1e-5
    step_init: float = 1.0
    backtrack_factor: float = 0.5
    armijo: float = 1e-4
    tol: float = 1e-10
    max_iters: int = 10000
    starts: int = 100
    seed: int = 0
    floor: float = 0.05  # smallest admissible frequency, radians
    lower: float = 0.2  # lower end of the start/bracket range, radians
    greedy_spacing: float = 0.05  # coarse bracket grid for the greedy 1-D search

    def __post_init__(self):
        for name in ("fd_step", "step_init", "tol", "floor", "lower", "greedy_spacing"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.backtrack_factor < 1:
            raise ValueError("backtrack_factor must lie in (0, 1)")
        if self.starts < 1 or self.max_iters < 1:
            raise ValueError("starts and max_iters must be at least 1")


@dataclass
class DescentResult:
    x: np.ndarray
    value: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, best: DescentResult | None = None):
        super().__init__(message)
        self.best = best


class SearchError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# heuristic frequencies
# ---------------------------------------------------------------------------


def _flatness(g):
    return np.cos(g) - g * np.sin(g)


def heuristic_frequencies(method, n: int, decimals: int | None = None) -> np.ndarray:
    """Heuristic frequencies in radians.

    Delta modulation: ``(2k + 1) pi / 2``, the flat tops of ``sin``.
    FSM: the first ``n`` positive roots of ``cos g - g sin g``, where
    ``eps cos(g eps)`` is stationary at ``eps = 1``. The k-th root lies in
    ``(k pi, k pi + pi / 2)``. ``decimals`` rounds the result.
    """
    if n < 1:
        raise ValueError(f"need at least one term, got n={n}")
    method = Method.parse(method)
    k = np.arange(n)
    if method is Method.DMOD:
        g = (2 * k + 1) * np.pi / 2
    else:
        g = np.array([bisect(_flatness, j * np.pi, j * np.pi + np.pi / 2, xtol=1e-13) for j in k])
    return np.round(g, decimals) if decimals is not None else g


# ---------------------------------------------------------------------------
# objective and descent
# ---------------------------------------------------------------------------


class ResidualObjective:
    """Profile residual as a function of the frequency vector.

    Inputs are sorted and clipped at ``floor`` before evaluation. Returns
    ``inf`` where the Gram matrix is ill-conditioned so line searches step
    away from coinciding frequencies.
    """

    def __init__(self, method, delta: float = 0.5, theta: float = np.pi / 2, target: TargetProfile | None = None,
                 floor: float = 0.05):
        self.method = Method.parse(method)
        self.delta = delta
        self.target = target or TargetProfile.default(self.method, theta)
        self.floor = floor
        self._norm_sq = target_norm_sq(BasisSpec(self.method, np.array([1.0]), delta), self.target)
        self.evaluations = 0

    def normalize(self, gammas) -> np.ndarray:
        return np.sort(np.maximum(np.asarray(gammas, dtype=float), self.floor))

    def basis(self, gammas) -> BasisSpec:
        return BasisSpec(self.method, self.normalize(gammas), self.delta)

    def __call__(self, gammas) -> float:
        self.evaluations += 1
        g = self.normalize(gammas)
        if g.size > 1 and np.any(np.diff(g) <= 0):
            return np.inf
        basis = BasisSpec(self.method, g, self.delta)
        gram = gram_matrix(basis)
        rhs = projection_vector(basis, self.target)
        try:
            a = _solve(gram, rhs, g)
        except IllConditionedError:
            return np.inf
        r2 = self._norm_sq - 2.0 * rhs @ a + a @ gram @ a
        return float(np.sqrt(max(r2, 0.0)))


def numerical_gradient(functional: Callable[[np.ndarray], float], gammas, fd_step: float = 1e-5) -> np.ndarray:
    """Central-difference gradient ``(F(x + h e_k) - F(x - h e_k)) / 2h``."""
    if not fd_step > 0:
        raise ValueError(f"fd_step must be positive, got {fd_step}")
    x = np.asarray(gammas, dtype=float)
    grad = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = fd_step
        grad[k] = (functional(x + e) - functional(x - e)) / (2.0 * fd_step)
    return grad


def descend(objective: ResidualObjective | Callable, x0, options: SearchOptions = SearchOptions(),
            normalize: Callable | None = None) -> DescentResult:
    """Descent with central-difference gradients and backtracking line search.

    The search direction is the gradient scaled by a BFGS inverse-Hessian
    estimate; it falls back to steepest descent whenever that estimate does
    not give a descent direction. Accepted values never increase. Stops
    when the relative change of the objective drops below ``options.tol``.
    """
    norm = normalize or getattr(objective, "normalize", None) or (lambda v: np.asarray(v, dtype=float))
    x = norm(x0)
    f = objective(x)
    history = [f]
    if not np.isfinite(f):
        return DescentResult(x, np.inf, 0, False, history)
    n = x.size
    ident = np.eye(n) * options.step_init
    G = numerical_gradient(objective, x, options.fd_step)
    H = ident.copy()
    for it in range(1, options.max_iters + 1):
        if not np.all(np.isfinite(G)):
            return DescentResult(x, f, it - 1, False, history)
        if not np.any(G):
            return DescentResult(x, f, it - 1, True, history)
        p = -H @ G
        slope = G @ p
        if not slope < 0:
            H = ident.copy()
            p = -H @ G
            slope = G @ p
        t = 1.0
        while True:
            xn = norm(x + t * p)
            fn = objective(xn)
            if fn <= f + options.armijo * t * slope:
                break
            t *= options.backtrack_factor
            if t < 1e-14:
                break
        if not fn <= f + options.armijo * t * slope:
            if np.array_equal(H, ident):
                # no decrease along steepest descent: stationary to working precision
                return DescentResult(x, f, it, True, history)
            H = ident.copy()
            continue
        Gn = numerical_gradient(objective, xn, options.fd_step)
        if not np.all(np.isfinite(Gn)):
            history.append(fn)
            return DescentResult(xn, fn, it, False, history)
        s = xn - x
        y = Gn - G
        unsorted = not np.array_equal(np.argsort(x + t * p, kind="stable"), np.arange(n))
        sy = s @ y
        if unsorted:
            H = ident.copy()
        elif sy > 1e-16:
            rho = 1.0 / sy
            V = np.eye(n) - rho * np.outer(s, y)
            H = V @ H @ V.T + rho * np.outer(s, s)
        done = abs(f - fn) <= options.tol * max(abs(f), 1e-300)
        x, f, G = xn, fn, Gn
        history.append(f)
        if done:
            return DescentResult(x, f, it, True, history)
    return DescentResult(x, f, options.max_iters, False, history)


# ---------------------------------------------------------------------------
# designs
# ---------------------------------------------------------------------------


def _record(method, gammas, theta_deg, delta, selection, seed, target, extras=None) -> DesignRecord:
    basis = BasisSpec(method, np.asarray(gammas, dtype=float), delta)
    target = target or TargetProfile.default(method, np.radians(theta_deg))
    alphas = gram_solve(basis, target)
    rec = DesignRecord(
        method=method,
        theta_deg=theta_deg,
        delta=delta,
        gammas_deg=list(np.degrees(basis.gammas)),
        alphas_deg=list(np.degrees(alphas)),
        selection=selection,
        seed=seed,
    )
    obj = ResidualObjective(method, delta, target=target)
    rec.extras.update(
        residual=obj(basis.gammas),
        state_error=hamiltonian_state_error(basis, alphas) if target.kind != "custom" else None,
    )
    rec.extras.update(extras or {})
    return rec


def heuristic_design(method, n: int, theta_deg: float = 90.0, delta: float = 0.5, root_decimals: int | None = 2,
                     target: TargetProfile | None = None) -> DesignRecord:
    """Heuristic frequencies with least-squares amplitudes.

    ``root_decimals`` rounds the FSM roots (in radians); two decimals give
    the frequencies 49.3, 196.5, 369.0, 546.0 degrees of the published
    heuristic FSM designs. Delta-modulation frequencies are never rounded.
    """
    method = Method.parse(method)
    g = heuristic_frequencies(method, n, root_decimals if method is Method.FSM else None)
    return _record(method, g, theta_deg, delta, Selection.HEURISTIC, 0, target)


def _local_minima(values: np.ndarray) -> np.ndarray:
    v = np.where(np.isfinite(values), values, np.inf)
    left = np.concatenate([[np.inf], v[:-1]])
    right = np.concatenate([v[1:], [np.inf]])
    idx = np.flatnonzero((v <= left) & (v <= right) & np.isfinite(v))
    return idx


def _greedy_sequence(objective: ResidualObjective, n: int, options: SearchOptions) -> list[DescentResult]:
    fixed: list[float] = []
    steps = []
    for k in range(1, n + 1):
        upper = (2 * k + 2) * np.pi / 2
        grid = np.arange(options.lower, upper, options.greedy_spacing)
        vals = np.array([objective(np.array(fixed + [g])) for g in grid])
        starts = _local_minima(vals)
        if starts.size == 0:
            raise SearchError(f"greedy step {k}: every bracket point is ill-conditioned")

        def one_d(x, fixed=tuple(fixed)):
            return objective(np.array(fixed + (float(x[0]),)))

        def clip(x):
            return np.maximum(np.asarray(x, dtype=float), options.floor)

        best = None
        for i in starts:
            res = descend(one_d, np.array([grid[i]]), options, normalize=clip)
            if best is None or res.value < best.value:
                best = res
        if not best.converged:
            raise ConvergenceError(f"greedy step {k} did not converge in {options.max_iters} iterations", best)
        fixed = sorted(fixed + [float(best.x[0])])
        steps.append(replace(best, x=np.array(fixed)))
        log.debug("greedy step %d: gammas=%s residual=%.6g", k, np.degrees(fixed), best.value)
    return steps


def greedy_search(method, n: int, theta_deg: float = 90.0, delta: float = 0.5,
                  options: SearchOptions = SearchOptions(), target: TargetProfile | None = None,
                  keep_heuristic: bool = True) -> DesignRecord:
    """Choose frequencies one at a time, holding earlier ones fixed.

    Step k scans a coarse grid of the new frequency over
    ``[lower, (2k + 2) pi / 2]`` and runs a 1-D descent from every local
    minimum of that scan. With ``keep_heuristic`` the heuristic frequency
    set is retained when it beats the sequential result, so the greedy
    residual never exceeds the heuristic one.
    """
    method = Method.parse(method)
    if n < 1:
        raise ValueError(f"need at least one term, got n={n}")
    objective = ResidualObjective(method, delta, np.radians(theta_deg), target, options.floor)
    steps = _greedy_sequence(objective, n, options)
    gammas = steps[-1].x
    sequential = {"gammas_deg": list(np.degrees(gammas)), "residual": steps[-1].value}
    extras = {"sequential": sequential, "source": "sequential"}
    if keep_heuristic:
        h = heuristic_frequencies(method, n, 2 if method is Method.FSM else None)
        if objective(h) < steps[-1].value:
            gammas = h
            extras["source"] = "heuristic"
    return _record(method, gammas, theta_deg, delta, Selection.GREEDY, options.seed, target, extras)


def gradient_search(method, n: int, theta_deg: float = 90.0, delta: float = 0.5,
                    options: SearchOptions = SearchOptions(), target: TargetProfile | None = None,
                    anchors: bool = True) -> DesignRecord:
    """Descend on all frequencies at once from many starting points.

    ``options.starts`` starting vectors are drawn from
    ``default_rng(options.seed)``, uniform on ``[lower, (2n + 2) pi / 2]``
    per coordinate and sorted. With ``anchors`` the heuristic and greedy
    frequency sets are prepended as starts 0 and 1. The lowest residual
    wins; ties go to the lower start index.
    """
    method = Method.parse(method)
    if n < 1:
        raise ValueError(f"need at least one term, got n={n}")
    objective = ResidualObjective(method, delta, np.radians(theta_deg), target, options.floor)
    rng = np.random.default_rng(options.seed)
    upper = (2 * n + 2) * np.pi / 2
    starts = list(np.sort(rng.uniform(options.lower, upper, size=(options.starts, n)), axis=1))
    if anchors:
        greedy = greedy_search(method, n, theta_deg, delta, options, target)
        starts = [heuristic_frequencies(method, n, 2 if method is Method.FSM else None), greedy.gammas] + starts
    best, best_idx = None, -1
    for i, x0 in enumerate(starts):
        res = descend(objective, x0, options)
        if np.isfinite(res.value) and (best is None or res.value < best.value):
            best, best_idx = res, i
    if best is None:
        raise SearchError("every starting point failed the conditioning guard")
    extras = {"start_index": best_idx, "iterations": best.iterations, "converged": best.converged,
              "evaluations": objective.evaluations}
    return _record(method, best.x, theta_deg, delta, Selection.GRADIENT, options.seed, target, extras)


def design(method, n: int, selection="heuristic", theta_deg: float = 90.0, delta: float = 0.5,
           options: SearchOptions | None = None, target: TargetProfile | None = None) -> DesignRecord:
    """Run the named frequency-selection strategy."""
    selection = Selection.parse(selection)
    options = options or SearchOptions()
    if selection is Selection.HEURISTIC:
        return heuristic_design(method, n, theta_deg, delta, target=target)
    if selection is Selection.GREEDY:
        return greedy_search(method, n, theta_deg, delta, options, target)
    return gradient_search(method, n, theta_deg, delta, options, target)
