"""Trigonometric least squares for the effective rotation profile.

For FSM the basis is ``cos(gamma_k eps)`` and the default target is
``theta / eps`` (the leading eps of the effective generator is divided out);
for delta modulation the basis is ``sin(gamma_k eps)`` and the default target
is the constant ``theta``. Inner products are integrals over
``[1 - delta, 1 + delta]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad, simpson
from scipy.special import sici

from .records import Method
from .so3 import rotvec_exp

COND_LIMIT = 1e12


class IllConditionedError(ValueError):
    """The Gram matrix is numerically singular; ``pair`` names the worst frequency pair."""

    def __init__(self, message: str, pair: tuple[int, int] | None = None, condition: float = np.inf):
        super().__init__(message)
        self.pair = pair
        self.condition = condition


@dataclass(frozen=True)
class BasisSpec:
    method: Method
    gammas: np.ndarray  # radians
    delta: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "method", Method.parse(self.method))
        g = np.atleast_1d(np.asarray(self.gammas, dtype=float))
        object.__setattr__(self, "gammas", g)
        if g.size and (np.any(g <= 0) or np.any(np.diff(g) <= 0)):
            raise ValueError(f"frequencies must be positive and strictly ascending, got {g}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")

    @property
    def lo(self) -> float:
        return 1.0 - self.delta

    @property
    def hi(self) -> float:
        return 1.0 + self.delta

    def functions(self, eps) -> np.ndarray:
        """Basis values, shape ``(n_terms,) + eps.shape``."""
        eps = np.asarray(eps, dtype=float)
        arg = np.multiply.outer(self.gammas, eps)
        return np.cos(arg) if self.method is Method.FSM else np.sin(arg)


class TargetProfile:
    """What ``sum(alpha_k * basis_k(eps))`` should approximate.

    ``kind`` is ``"constant"`` (value ``theta``), ``"inverse"``
    (``theta / eps``) or ``"custom"``; the first two have closed-form
    projections.
    """

    def __init__(self, evaluator: Callable[[float], float], kind: str = "custom", theta: float | None = None):
        if kind not in ("constant", "inverse", "custom"):
            raise ValueError(f"unknown target kind {kind!r}")
        self.evaluator = evaluator
        self.kind = kind
        self.theta = theta

    def __call__(self, eps):
        return self.evaluator(eps)

    @classmethod
    def constant(cls, theta: float) -> "TargetProfile":
        return cls(lambda e: theta * np.ones_like(np.asarray(e, dtype=float)), "constant", theta)

    @classmethod
    def inverse(cls, theta: float) -> "TargetProfile":
        return cls(lambda e: theta / np.asarray(e, dtype=float), "inverse", theta)

    @classmethod
    def default(cls, method, theta: float) -> "TargetProfile":
        return cls.inverse(theta) if Method.parse(method) is Method.FSM else cls.constant(theta)

    def __repr__(self):
        return f"TargetProfile(kind={self.kind!r}, theta={self.theta!r})"


def _cos_integral(w, delta):
    # int_{1-d}^{1+d} cos(w e) de = 2 cos(w) sin(w d) / w, written to be exact at w = 0
    w = np.asarray(w, dtype=float)
    return 2.0 * delta * np.cos(w) * np.sinc(w * delta / np.pi)


def gram_matrix(basis: BasisSpec) -> np.ndarray:
    """Closed-form Gram matrix via product-to-sum identities."""
    g = basis.gammas
    diff = _cos_integral(g[:, None] - g[None, :], basis.delta)
    summ = _cos_integral(g[:, None] + g[None, :], basis.delta)
    sign = 1.0 if basis.method is Method.FSM else -1.0
    return 0.5 * (diff + sign * summ)


def projection_vector(basis: BasisSpec, target: TargetProfile) -> np.ndarray:
    """``V_i = <basis_i, target>``; closed forms for the built-in targets."""
    g, lo, hi = basis.gammas, basis.lo, basis.hi
    fsm = basis.method is Method.FSM
    if target.kind == "constant":
        if fsm:
            return target.theta * _cos_integral(g, basis.delta)
        return target.theta * 2.0 * np.sin(g) * np.sin(g * basis.delta) / g
    if target.kind == "inverse":
        si_hi, ci_hi = sici(g * hi)
        si_lo, ci_lo = sici(g * lo)
        return target.theta * ((ci_hi - ci_lo) if fsm else (si_hi - si_lo))
    base = np.cos if fsm else np.sin
    return np.array(
        [quad(lambda e, w=w: base(w * e) * float(target(e)), lo, hi, epsabs=1e-12, epsrel=1e-12, limit=400)[0] for w in g]
    )


def target_norm_sq(basis: BasisSpec, target: TargetProfile) -> float:
    """``int target(eps)^2 deps`` over the basis interval."""
    lo, hi = basis.lo, basis.hi
    if target.kind == "constant":
        return target.theta**2 * (hi - lo)
    if target.kind == "inverse":
        return target.theta**2 * (1.0 / lo - 1.0 / hi)
    return quad(lambda e: float(target(e)) ** 2, lo, hi, epsabs=1e-12, epsrel=1e-12, limit=400)[0]


def _worst_pair(gram: np.ndarray) -> tuple[int, int] | None:
    n = gram.shape[0]
    if n < 2:
        return None
    d = np.sqrt(np.abs(np.diag(gram)))
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.abs(gram) / np.outer(d, d)
    np.fill_diagonal(corr, -np.inf)
    i, j = np.unravel_index(np.nanargmax(corr), corr.shape)
    return (int(min(i, j)), int(max(i, j)))


def _solve(gram: np.ndarray, rhs: np.ndarray, gammas: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(gram)):
        raise IllConditionedError("Gram matrix has non-finite entries")
    lam, Q = np.linalg.eigh(gram)
    if lam[0] <= lam[-1] / COND_LIMIT:
        cond = lam[-1] / lam[0] if lam[0] > 0 else np.inf
        pair = _worst_pair(gram)
        where = ""
        if pair is not None:
            i, j = pair
            where = f"; frequencies {i} and {j} ({gammas[i]:.6g} and {gammas[j]:.6g} rad) are nearly collinear"
        raise IllConditionedError(f"Gram matrix condition number {cond:.3g} exceeds {COND_LIMIT:.0e}{where}", pair, cond)
    return Q @ ((Q.T @ rhs) / lam)


def gram_solve(basis: BasisSpec, target: TargetProfile | None = None) -> np.ndarray:
    """Least-squares amplitudes (radians) for ``basis`` against ``target``.

    Raises
    ------
    IllConditionedError
        If the Gram matrix condition number reaches 1e12.
    ValueError
        If the basis is empty.
    """
    if basis.gammas.size == 0:
        raise ValueError("cannot solve for an empty basis")
    target = target or TargetProfile.default(basis.method, np.pi / 2)
    return _solve(gram_matrix(basis), projection_vector(basis, target), basis.gammas)


def effective_profile(basis: BasisSpec, alphas) -> Callable[[np.ndarray], np.ndarray]:
    """Effective y-rotation angle as a function of eps.

    FSM: ``eps * sum(alpha_k cos(gamma_k eps))``;
    delta modulation: ``sum(alpha_k sin(gamma_k eps))``.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    if alphas.shape != basis.gammas.shape:
        raise ValueError(f"got {alphas.size} amplitudes for {basis.gammas.size} frequencies")
    fsm = basis.method is Method.FSM

    def f(eps):
        eps = np.asarray(eps, dtype=float)
        s = np.tensordot(alphas, basis.functions(eps), axes=1)
        return eps * s if fsm else s

    return f


def residual_functional(basis: BasisSpec, target: TargetProfile | None = None, alphas=None) -> float:
    """``sqrt(int (sum alpha_k basis_k - target)^2 deps)``.

    Uses the least-squares amplitudes unless ``alphas`` is given. The
    squared integral is evaluated exactly from the Gram quantities.
    """
    target = target or TargetProfile.default(basis.method, np.pi / 2)
    gram = gram_matrix(basis)
    rhs = projection_vector(basis, target)
    a = _solve(gram, rhs, basis.gammas) if alphas is None else np.asarray(alphas, dtype=float)
    r2 = target_norm_sq(basis, target) - 2.0 * rhs @ a + a @ gram @ a
    return float(np.sqrt(max(r2, 0.0)))


def ideal_states(basis: BasisSpec, alphas, eps) -> np.ndarray:
    """States reached from ``(0, 0, 1)`` under ``exp(f(eps) Omega_y)``."""
    f = effective_profile(basis, alphas)(eps)
    vec = np.zeros(np.shape(f) + (3,))
    vec[..., 1] = f
    return np.einsum("...ij,j->...i", rotvec_exp(vec), np.array([0.0, 0.0, 1.0]))


def hamiltonian_state_error(basis: BasisSpec, alphas, target_state=(1.0, 0.0, 0.0), count: int = 201) -> float:
    """L2 state error of the ideal effective rotation (no splitting error)."""
    if count < 3 or count % 2 == 0:
        raise ValueError(f"count must be odd and >= 3, got {count}")
    eps = np.linspace(basis.lo, basis.hi, count)
    states = ideal_states(basis, alphas, eps)
    resid = np.sum((states - np.asarray(target_state, dtype=float)) ** 2, axis=1)
    return float(np.sqrt(max(simpson(resid, x=eps), 0.0)))
