"""Rotation algebra on SO(3).

Rotations are plain ``(3, 3)`` float arrays. The generators follow the
right-hand rule, ``exp(a * OMEGA_Y)`` takes ``(0, 0, 1)`` towards ``(1, 0, 0)``.
All exponentials use the closed Rodrigues form, never a truncated series.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

OMEGA_X = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
OMEGA_Y = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
OMEGA_Z = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])

GENERATORS = {"x": OMEGA_X, "y": OMEGA_Y, "z": OMEGA_Z}
AXES = {"x": np.array([1.0, 0.0, 0.0]), "y": np.array([0.0, 1.0, 0.0]), "z": np.array([0.0, 0.0, 1.0])}

for _arr in (*GENERATORS.values(), *AXES.values()):
    _arr.setflags(write=False)
del _arr


def hat(v) -> np.ndarray:
    """Skew matrix ``v . (Ox, Oy, Oz)``; broadcasts over leading axes."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def vee(m) -> np.ndarray:
    """Inverse of :func:`hat` applied to the antisymmetric part of ``m``."""
    m = np.asarray(m, dtype=float)
    return 0.5 * np.stack(
        [m[..., 2, 1] - m[..., 1, 2], m[..., 0, 2] - m[..., 2, 0], m[..., 1, 0] - m[..., 0, 1]],
        axis=-1,
    )


def axis_angle_exp(axis, angle: float) -> np.ndarray:
    """Return ``exp(angle * (axis . Omega))`` for a unit ``axis``.

    Raises
    ------
    ValueError
        If ``axis`` is not a unit 3-vector (tolerance 1e-9).
    """
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,):
        raise ValueError(f"axis must be a 3-vector, got shape {n.shape}")
    norm = np.linalg.norm(n)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"axis must have unit norm, got |axis| = {norm!r}")
    K = hat(n)
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


def rotvec_exp(v) -> np.ndarray:
    """Exponentiate rotation vectors ``v`` of shape ``(..., 3)``.

    The rotation angle is ``|v|`` about ``v / |v|``. Zero vectors map to the
    identity. Vectorised so an entire ensemble can be handled in one call.
    """
    v = np.asarray(v, dtype=float)
    angle = np.linalg.norm(v, axis=-1)
    safe = np.where(angle > 0.0, angle, 1.0)
    K = hat(v / safe[..., None])
    s = np.sin(angle)[..., None, None]
    c = (1.0 - np.cos(angle))[..., None, None]
    return np.eye(3) + s * K + c * (K @ K)


def compose(sequence: Sequence[np.ndarray] | Iterable[np.ndarray]) -> np.ndarray:
    """Compose rotations given in time order (first applied first)."""
    out = None
    for r in sequence:
        r = np.asarray(r, dtype=float)
        out = r.copy() if out is None else r @ out
    if out is None:
        raise ValueError("cannot compose an empty sequence of rotations")
    return out


def rotation_angle(r) -> float:
    """Rotation angle of ``r`` in ``[0, pi]``.

    Uses ``atan2(|vee(r)|, (tr r - 1) / 2)`` which stays accurate at both
    ends of the range, unlike ``arccos`` of the trace alone.
    """
    r = np.asarray(r, dtype=float)
    s = np.linalg.norm(vee(r), axis=-1)
    c = 0.5 * (np.trace(r, axis1=-2, axis2=-1) - 1.0)
    return np.arctan2(s, c)


def geodesic_distance(a, b) -> float:
    """Angle of the relative rotation ``a.T @ b``, in ``[0, pi]``."""
    return float(rotation_angle(np.asarray(a, dtype=float).T @ np.asarray(b, dtype=float)))


def axis_angle(r) -> tuple[np.ndarray, float]:
    """Decompose ``r`` into a unit axis and an angle in ``[0, pi]``.

    At angle 0 the axis is arbitrary and ``(0, 0, 1)`` is returned. Near pi
    the axis comes from the symmetric part; its sign is fixed by the
    antisymmetric part when that is informative and otherwise so that the
    first nonzero component is positive.
    """
    r = np.asarray(r, dtype=float)
    w = vee(r)
    s = np.linalg.norm(w)
    c = 0.5 * (np.trace(r) - 1.0)
    angle = float(np.arctan2(s, c))
    if angle < 1e-12:
        return np.array([0.0, 0.0, 1.0]), 0.0
    if c > -0.5:
        return w / s, angle
    # 1 - cos(a) is large here, so the outer product is well conditioned
    B = 0.5 * (r + r.T) - c * np.eye(3)
    k = int(np.argmax(np.diag(B)))
    axis = B[:, k] / np.sqrt(B[k, k] * (1.0 - c))
    axis /= np.linalg.norm(axis)
    if s > 1e-9:
        if np.dot(axis, w) < 0:
            axis = -axis
    else:
        nz = np.flatnonzero(np.abs(axis) > 1e-12)
        if axis[nz[0]] < 0:
            axis = -axis
    return axis, angle


def is_rotation(r, atol: float = 1e-12) -> bool:
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3):
        return False
    return bool(np.allclose(r.T @ r, np.eye(3), rtol=0.0, atol=atol) and abs(np.linalg.det(r) - 1.0) <= atol)
