"""Closed forms for a single-photon input.

For input |1> the conditional output is a displaced superposition of |0> and
|1>:

    T_q(beta)|1> = sqrt((1-q^2)/pi) exp(-(1-q^2)|beta|^2/2)
                   D((1-q)beta) ((1-q^2) beta^* |0> + q |1>)

These serve as oracles for the numeric channel in :mod:`cvteleport.channel`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateOutcomeError, DomainError
from .fock import DEFAULT_CUTOFF, FockVector, _check_beta, apply, displacement_closed_form, displacement_stack


def _check_q(q: float, allow_zero: bool = True) -> float:
    q = float(q)
    lo_ok = q >= 0.0 if allow_zero else q > 0.0
    if not (lo_ok and q < 1.0):
        bound = "0 <= q < 1" if allow_zero else "0 < q < 1"
        raise DomainError(f"entanglement parameter must satisfy {bound}, got {q!r}")
    return q


def _superposition(q: float, beta: complex, cutoff: int) -> np.ndarray:
    if cutoff < 2:
        raise DomainError("single-photon forms need cutoff >= 2")
    amps = np.zeros(cutoff, dtype=complex)
    amps[0] = (1 - q**2) * beta.conjugate()
    amps[1] = q
    return amps


@dataclass(frozen=True)
class CoherenceValue:
    """Output field amplitude split into its two contributions."""

    measurement_induced: complex
    classical_feedthrough: complex

    @property
    def value(self) -> complex:
        return self.measurement_induced + self.classical_feedthrough


def single_photon_output_unnormalized(q: float, beta: complex, cutoff: int = DEFAULT_CUTOFF) -> FockVector:
    q = _check_q(q)
    beta = _check_beta(beta)
    a = 1 - q**2
    scale = math.sqrt(a / math.pi) * math.exp(-a * abs(beta) ** 2 / 2)
    vec = apply(displacement_closed_form((1 - q) * beta, cutoff), FockVector(_superposition(q, beta, cutoff)))
    return FockVector(scale * vec.amplitudes)


def single_photon_output_normalized(q: float, beta: complex, cutoff: int = DEFAULT_CUTOFF) -> FockVector:
    q = _check_q(q)
    beta = _check_beta(beta)
    norm2 = q**2 + (1 - q**2) ** 2 * abs(beta) ** 2
    if norm2 == 0.0:
        raise DegenerateOutcomeError("output undefined at q = 0, beta = 0")
    vec = apply(displacement_closed_form((1 - q) * beta, cutoff), FockVector(_superposition(q, beta, cutoff)))
    return FockVector(vec.amplitudes / math.sqrt(norm2))


def coherence_analytic(q: float, beta: complex) -> CoherenceValue:
    q = _check_q(q)
    beta = _check_beta(beta)
    if q == 0 and beta == 0:
        raise DegenerateOutcomeError("coherence undefined at q = 0, beta = 0")
    if beta == 0:
        return CoherenceValue(0j, 0j)
    denom = q**2 + (1 - q**2) ** 2 * abs(beta) ** 2
    return CoherenceValue(q * (1 - q**2) * beta / denom, (1 - q) * beta)


def single_photon_density(q: float, beta) -> float | np.ndarray:
    """Outcome density for input |1>; accepts scalar or array ``beta``."""
    q = _check_q(q)
    a = 1 - q**2
    r2 = np.abs(beta) ** 2
    out = a / math.pi * np.exp(-a * r2) * (q**2 + a**2 * r2)
    return float(out) if np.ndim(out) == 0 else out


def coherence_peak(q: float) -> tuple[float, float]:
    """Location and height of the maximum of the measurement-induced term over |beta|.

    The height is 1/2 for every q; the location is q/(1-q^2).
    """
    q = _check_q(q, allow_zero=False)
    r = q / (1 - q**2)
    return r, abs(coherence_analytic(q, r).measurement_induced)


def single_photon_observables(q: float, betas, cutoff: int = DEFAULT_CUTOFF, chunk: int = 512):
    """Field amplitude and single-photon fidelity of the normalized output, batched.

    Returns ``(coherence, fidelity)`` arrays. The field amplitude is taken
    numerically from the closed-form output vector, not from the coherence formula.
    """
    q = _check_q(q)
    betas = np.atleast_1d(np.asarray(betas, dtype=complex))
    if np.any((betas == 0) & (q == 0)):
        raise DegenerateOutcomeError("output undefined at q = 0, beta = 0")
    coh = np.empty(betas.size, dtype=complex)
    fid = np.empty(betas.size)
    sqrt_n = np.sqrt(np.arange(1, cutoff))
    for start in range(0, betas.size, chunk):
        b = betas[start:start + chunk]
        d = displacement_stack((1 - q) * b, cutoff)
        norm = np.sqrt(q**2 + (1 - q**2) ** 2 * np.abs(b) ** 2)
        vecs = (d[:, :, 0] * ((1 - q**2) * b.conj())[:, None] + d[:, :, 1] * q) / norm[:, None]
        coh[start:start + chunk] = np.sum(vecs[:, :-1].conj() * sqrt_n * vecs[:, 1:], axis=1)
        fid[start:start + chunk] = np.abs(vecs[:, 1]) ** 2
    return coh, fid
