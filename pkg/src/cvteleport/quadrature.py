"""Polar quadrature over a disk in the complex plane."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError

AREA_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Gauss-Legendre radial nodes times uniformly spaced angles.

    ``radial_weights`` already include the Jacobian ``r``, so a disk integral
    is ``sum_ij radial_weights[i] * angular_step * f(r_i e^{i theta_j})``.
    """

    radial_nodes: np.ndarray
    radial_weights: np.ndarray
    angular_count: int
    radius_max: float

    def __post_init__(self):
        nodes = np.asarray(self.radial_nodes, dtype=float)
        weights = np.asarray(self.radial_weights, dtype=float)
        object.__setattr__(self, "radial_nodes", nodes)
        object.__setattr__(self, "radial_weights", weights)
        if nodes.ndim != 1 or nodes.size == 0 or nodes.shape != weights.shape:
            raise QuadratureError("radial nodes and weights must be matching non-empty 1-d arrays")
        if self.angular_count < 1:
            raise QuadratureError(f"angular_count must be positive, got {self.angular_count}")
        if not math.isfinite(self.radius_max) or self.radius_max < 0:
            raise QuadratureError(f"radius_max must be finite and non-negative, got {self.radius_max}")
        if np.any(weights < 0):
            raise QuadratureError("radial weights must be non-negative")
        if np.any(nodes < 0) or np.any(nodes > self.radius_max):
            raise QuadratureError("radial nodes must lie in [0, radius_max]")
        area = math.fsum(weights) * self.angular_count * self.angular_step
        target = math.pi * self.radius_max**2
        if abs(area - target) > AREA_TOL * max(1.0, target):
            raise QuadratureError(f"grid area {area!r} does not reproduce pi R^2 = {target!r}")

    @property
    def angular_step(self) -> float:
        return 2 * math.pi / self.angular_count

    @property
    def angles(self) -> np.ndarray:
        return self.angular_step * np.arange(self.angular_count)

    @property
    def shape(self) -> tuple[int, int]:
        return self.radial_nodes.size, self.angular_count

    def points(self) -> np.ndarray:
        """Complex nodes, shape (radial, angular)."""
        return self.radial_nodes[:, None] * np.exp(1j * self.angles)[None, :]

    def weights(self) -> np.ndarray:
        """Area weights matching :meth:`points`."""
        return np.repeat(self.radial_weights[:, None] * self.angular_step, self.angular_count, axis=1)

    def refined(self, factor: int = 2) -> QuadratureGrid:
        return polar_grid(self.radius_max, self.radial_nodes.size * factor, self.angular_count * factor)

    def integrate(self, values) -> float:
        """Disk integral of samples given on :meth:`points` (compensated sum)."""
        values = np.asarray(values)
        if values.shape != self.shape:
            raise QuadratureError(f"values have shape {values.shape}, grid is {self.shape}")
        return math.fsum((self.weights() * values).ravel())


def polar_grid(radius: float, radial: int = 96, angular: int = 64) -> QuadratureGrid:
    if radial < 1 or angular < 1:
        raise QuadratureError(f"need at least one node per direction, got {radial} x {angular}")
    if not math.isfinite(radius) or radius < 0:
        raise QuadratureError(f"radius must be finite and non-negative, got {radius}")
    x, w = np.polynomial.legendre.leggauss(radial)
    r = 0.5 * radius * (x + 1.0)
    return QuadratureGrid(r, 0.5 * radius * w * r, angular, float(radius))
