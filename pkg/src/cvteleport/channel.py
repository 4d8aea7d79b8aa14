"""Teleportation as a conditional channel on the truncated Fock space.

The transfer operator for measurement outcome ``beta`` is

    T_q(beta) = sqrt((1 - q^2)/pi) * sum_n q^n D(beta)|n><n|D(-beta)

and ``T_q(beta)|psi_in>`` is the unnormalized conditional output whose squared
norm is the outcome density P(beta) per unit area of the complex plane.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateOutcomeError, DomainError, PreconditionError
from .fock import (
    DEFAULT_CUTOFF,
    PRECONDITION_TOL,
    ComplexOperator,
    FockVector,
    _check_beta,
    _check_cutoff,
    _check_dims,
    displacement_stack,
)
from .quadrature import polar_grid

MIN_DENSITY = 1e-300


@dataclass(frozen=True)
class TeleportParams:
    """Entanglement parameter ``q`` plus the numerical truncation policy.

    ``sum_terms`` truncates the geometric series over n; it defaults to the
    cutoff. ``q = 1`` is rejected: the series has no normalizable limit there.
    """

    q: float
    cutoff: int = DEFAULT_CUTOFF
    sum_terms: int | None = None

    def __post_init__(self):
        q = float(self.q)
        if not (0.0 <= q < 1.0):
            raise DomainError(f"entanglement parameter must satisfy 0 <= q < 1, got {self.q!r}")
        object.__setattr__(self, "q", q)
        _check_cutoff(self.cutoff)
        terms = self.cutoff if self.sum_terms is None else self.sum_terms
        if not (1 <= terms <= self.cutoff):
            raise DomainError(f"sum_terms must be in 1..{self.cutoff}, got {terms}")
        object.__setattr__(self, "sum_terms", int(terms))

    @property
    def prefactor(self) -> float:
        return math.sqrt((1.0 - self.q**2) / math.pi)

    @property
    def series_residual(self) -> float:
        """Upper bound q^sum_terms / (1 - q) on the dropped geometric tail."""
        return self.q**self.sum_terms / (1.0 - self.q)

    @property
    def default_radius(self) -> float:
        """Integration radius beyond which the outcome density is negligible."""
        return 8.0 / math.sqrt(1.0 - self.q**2)

    def weights(self) -> np.ndarray:
        n = np.arange(self.cutoff)
        return np.where(n < self.sum_terms, self.q**n, 0.0)


@dataclass(frozen=True)
class MeasurementOutcome:
    beta: complex
    density: float = field(default=0.0)

    def __post_init__(self):
        if not self.density >= 0.0:
            raise DomainError(f"density must be non-negative, got {self.density!r}")


def transfer_stack(p: TeleportParams, betas) -> np.ndarray:
    """Transfer operators for a batch of outcomes, shape (B, cutoff, cutoff)."""
    d = displacement_stack(betas, p.cutoff)
    # D(-beta) = D(beta)^dagger elementwise for the exact matrix elements
    return p.prefactor * np.matmul(d * p.weights()[None, None, :], d.conj().transpose(0, 2, 1))


def transfer_operator(p: TeleportParams, beta: complex) -> ComplexOperator:
    beta = _check_beta(beta)
    return ComplexOperator(transfer_stack(p, [beta])[0])


def _check_input(p: TeleportParams, state: FockVector):
    _check_dims(p.cutoff, state.cutoff)
    norm2 = state.norm_squared()
    if abs(norm2 - 1.0) > PRECONDITION_TOL:
        raise PreconditionError(f"input state is not normalized: squared norm {norm2!r}")


def channel_batch(p: TeleportParams, betas, state: FockVector):
    """Unnormalized outputs T_q(beta)|psi> and densities for many outcomes.

    Returns ``(vectors, densities)`` with shapes (B, cutoff) and (B,).
    Avoids forming T explicitly: two matrix-vector products per outcome.
    """
    _check_input(p, state)
    d = displacement_stack(betas, p.cutoff)
    pulled = np.einsum("bnm,n->bm", d.conj(), state.amplitudes)  # D(-beta)|psi>
    out = p.prefactor * np.einsum("bmn,bn->bm", d, pulled * p.weights()[None, :])
    return out, np.sum(np.abs(out) ** 2, axis=1)


def apply_channel(p: TeleportParams, beta: complex, state: FockVector) -> tuple[FockVector, float]:
    """Return ``(T_q(beta)|psi>, P(beta))``; the vector is not normalized."""
    beta = _check_beta(beta)
    vecs, dens = channel_batch(p, [beta], state)
    return FockVector(vecs[0]), float(dens[0])


def conditional_output(p: TeleportParams, beta: complex, state: FockVector) -> FockVector:
    vec, density = apply_channel(p, beta, state)
    if density <= MIN_DENSITY:
        raise DegenerateOutcomeError(f"outcome beta={complex(beta)!r} has density {density!r}")
    return FockVector(vec.amplitudes / math.sqrt(density))


def completeness_integral(p: TeleportParams, radius: float, grid=(96, 64)) -> np.ndarray:
    """Quadrature estimate of the integral of T^dagger T over |beta| <= radius.

    Uses D(r e^{i theta}) = R(theta) D(r) R(-theta) with R(theta) = e^{i theta n}:
    only the radial nodes need operators, the angular sum acts as a phase mask.
    """
    g = polar_grid(radius, *grid)
    acc = np.zeros((p.cutoff, p.cutoff), dtype=complex)
    for chunk in np.array_split(np.arange(g.radial_nodes.size), max(1, g.radial_nodes.size // 32)):
        t = transfer_stack(p, g.radial_nodes[chunk])
        tt = np.matmul(t.conj().transpose(0, 2, 1), t)
        acc += np.tensordot(g.radial_weights[chunk], tt, axes=1)
    diff = np.subtract.outer(np.arange(p.cutoff), np.arange(p.cutoff))
    phase = np.exp(1j * np.multiply.outer(g.angles, diff)).sum(axis=0) * g.angular_step
    return acc * phase


def completeness_defect(p: TeleportParams, radius: float, grid=(96, 64), block: int | None = None) -> float:
    """Max-norm distance of the completeness integral from identity on a leading block.

    ``grid`` is ``(radial_nodes, angular_nodes)``; ``block`` defaults to cutoff // 2.
    """
    block = p.cutoff // 2 if block is None else block
    if not (1 <= block <= p.cutoff):
        raise DomainError(f"block must be in 1..{p.cutoff}, got {block}")
    integral = completeness_integral(p, radius, grid)[:block, :block]
    return float(np.max(np.abs(integral - np.eye(block))))
