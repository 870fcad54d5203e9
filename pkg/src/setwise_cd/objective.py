"""Smooth strongly convex quadratics with closed-form convex conjugates.

``Quadratic(Q, b, c0)`` represents ``f(x) = 0.5 x'Qx + b'x + c0`` with Q
symmetric positive definite, so the conjugate and its gradient are exact:
``f*(y) = 0.5 (y-b)' Q^-1 (y-b) - c0`` and ``grad f*(y) = Q^-1 (y-b)``.

The experiment family ``f(t) = t' c I t`` maps to ``Q = 2c I`` (so curvature
``mu = M = 2c``); :meth:`Quadratic.scaled_identity` applies that mapping.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch

_SYMMETRY_RTOL = 1e-12


class Quadratic:
    def __init__(self, Q: np.ndarray, b: np.ndarray | None = None, c0: float = 0.0):
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        d = Q.shape[0]
        if Q.shape != (d, d):
            raise DimensionMismatch(f"Q must be square, got {Q.shape}")
        if np.linalg.norm(Q - Q.T) > _SYMMETRY_RTOL * np.linalg.norm(Q):
            raise ValueError("Q is not symmetric")
        b = np.zeros(d) if b is None else np.asarray(b, dtype=float).reshape(-1)
        if b.shape != (d,):
            raise DimensionMismatch(f"b has shape {b.shape}, expected ({d},)")
        try:
            np.linalg.cholesky(Q)
        except np.linalg.LinAlgError as exc:
            raise ValueError("Q is not positive definite") from exc
        eigvals = np.linalg.eigvalsh(Q)
        self.Q = Q
        self.b = b
        self.c0 = float(c0)
        self.d = d
        self.mu = float(eigvals[0])
        self.M_smooth = float(eigvals[-1])
        self.Q_inv = np.linalg.inv(Q)

    @classmethod
    def scaled_identity(cls, d: int, c: float) -> "Quadratic":
        """The ``f(t) = t' cI t`` family, i.e. Q = 2c I, b = 0, c0 = 0."""
        if c <= 0:
            raise ValueError(f"c must be positive, got {c}")
        return cls(2.0 * c * np.eye(d))

    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape != (self.d,):
            raise DimensionMismatch(f"vector has shape {x.shape}, expected ({self.d},)")
        return x

    def value(self, x: np.ndarray) -> float:
        x = self._check(x)
        return float(0.5 * x @ self.Q @ x + self.b @ x + self.c0)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = self._check(x)
        return self.Q @ x + self.b

    def conjugate_gradient(self, y: np.ndarray) -> np.ndarray:
        y = self._check(y)
        return self.Q_inv @ (y - self.b)

    def conjugate_value(self, y: np.ndarray) -> float:
        y = self._check(y)
        w = y - self.b
        return float(0.5 * w @ self.Q_inv @ w - self.c0)

    def __repr__(self) -> str:
        return f"Quadratic(d={self.d}, mu={self.mu:.4g}, M={self.M_smooth:.4g})"


def quadratic_from_spec(spec: dict) -> Quadratic:
    """Build a Quadratic from its JSON description.

    ``{"type": "quadratic", "d": 5, "Q": "scaled_identity", "c": 50}`` uses the
    scaled-identity family; a dense form passes ``"Q_matrix"`` (row-major
    nested lists) plus optional ``"b"`` and ``"c0"``.
    """
    if spec.get("type", "quadratic") != "quadratic":
        raise ValueError(f"unsupported function type {spec.get('type')!r}")
    if spec.get("Q") == "scaled_identity":
        return Quadratic.scaled_identity(int(spec["d"]), float(spec["c"]))
    if "Q_matrix" in spec:
        return Quadratic(
            np.asarray(spec["Q_matrix"], dtype=float),
            np.asarray(spec["b"], dtype=float) if "b" in spec else None,
            float(spec.get("c0", 0.0)),
        )
    raise ValueError("function spec needs Q='scaled_identity' or a dense 'Q_matrix'")


def quadratic_to_spec(f: Quadratic) -> dict:
    return {
        "type": "quadratic",
        "d": f.d,
        "Q_matrix": f.Q.tolist(),
        "b": f.b.tolist(),
        "c0": f.c0,
    }
