"""Outcome-density quadrature and rejection sampling of measurement outcomes."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import single_photon_density
from .channel import MIN_DENSITY, MeasurementOutcome, TeleportParams, _check_input, channel_batch, transfer_stack
from .errors import DegenerateOutcomeError, DomainError, EnvelopeError
from .fock import FockVector
from .quadrature import QuadratureGrid, polar_grid

# outcomes per displacement batch; bounds memory at B * cutoff^2 complex entries
BATCH = 512
ENVELOPE_INFLATION = 1.2
# relative slack on the envelope assertion, covers rounding at the exact maximum
ENVELOPE_SLACK = 1e-9
ERROR_FLOOR = 1e-12


def density_on_grid(p: TeleportParams, state: FockVector, grid: QuadratureGrid) -> np.ndarray:
    """P(beta) at every grid point, shape (radial, angular).

    Rotation covariance T(r e^{it}) = R(t) T(r) R(-t) with R(t) = e^{i t n} means
    one operator per radial node serves all angles.
    """
    _check_input(p, state)
    n = np.arange(p.cutoff)
    rotated = np.exp(-1j * np.outer(n, grid.angles)) * state.amplitudes[:, None]  # (N, M)
    out = np.empty(grid.shape)
    nodes = grid.radial_nodes
    for start in range(0, nodes.size, 32):
        t = transfer_stack(p, nodes[start:start + 32])
        out[start:start + 32] = np.sum(np.abs(t @ rotated) ** 2, axis=1)
    return out


def integrate_density(p: TeleportParams, state: FockVector, grid: QuadratureGrid) -> float:
    """Total outcome probability inside the grid's disk."""
    return grid.integrate(density_on_grid(p, state, grid))


def integrate_density_with_error(p: TeleportParams, state: FockVector, grid: QuadratureGrid) -> tuple[float, float]:
    """Integral plus an error estimate from the same disk at half the node counts."""
    value = integrate_density(p, state, grid)
    nr, na = grid.shape
    coarse = polar_grid(grid.radius_max, max(1, nr // 2), max(1, na // 2))
    return value, abs(value - integrate_density(p, state, coarse)) + ERROR_FLOOR


def _envelope_sigma2(q: float) -> float:
    # per-component variance of the Gaussian proposal
    return 1.0 / (1.0 - q**2)


def _envelope(beta: np.ndarray, sigma2: float) -> np.ndarray:
    return np.exp(-np.abs(beta) ** 2 / (2 * sigma2)) / (2 * math.pi * sigma2)


def single_photon_envelope_constant(q: float) -> float:
    """Exact sup of P1(beta) / envelope(beta) for the single-photon input.

    With a = 1 - q^2 the ratio is 2 exp(-a u / 2) (q^2 + a^2 u) in u = |beta|^2,
    maximal at u = (2a - q^2)/a^2 when that is positive and at u = 0 otherwise.
    """
    a = 1.0 - q**2
    u = (2 * a - q**2) / a**2
    if u <= 0:
        return 2 * q**2
    return 2 * math.exp(-a * u / 2) * (q**2 + a**2 * u)


def _is_single_photon(state: FockVector) -> bool:
    amps = state.amplitudes
    return amps.size > 1 and abs(abs(amps[1]) - 1.0) <= 1e-15 and np.count_nonzero(amps) == 1


def envelope_constant(p: TeleportParams, state: FockVector) -> float:
    if _is_single_photon(state):
        return single_photon_envelope_constant(p.q)
    grid = polar_grid(p.default_radius, 160, 32)
    ratio = density_on_grid(p, state, grid) / _envelope(grid.points(), _envelope_sigma2(p.q))
    return ENVELOPE_INFLATION * float(ratio.max())


def outcome_densities(p: TeleportParams, state: FockVector, betas: np.ndarray) -> np.ndarray:
    if _is_single_photon(state):
        return single_photon_density(p.q, betas)
    out = np.empty(betas.size)
    for start in range(0, betas.size, BATCH):
        out[start:start + BATCH] = channel_batch(p, betas[start:start + BATCH], state)[1]
    return out


@dataclass(frozen=True, eq=False)
class SampleBatch:
    seed: int
    betas: np.ndarray
    densities: np.ndarray
    acceptance_rate: float
    envelope_constant: float

    @property
    def outcomes(self) -> list[MeasurementOutcome]:
        return [MeasurementOutcome(complex(b), float(d)) for b, d in zip(self.betas, self.densities)]

    def __len__(self):
        return self.betas.size

    def to_bytes(self) -> bytes:
        return self.betas.tobytes() + self.densities.tobytes()


def _worker_draw(p, state, count, seed, worker, M, sigma2):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, worker])))
    analytic = _is_single_photon(state)
    betas, dens = [], []
    have = proposed = accepted = 0
    while have < count:
        size = math.ceil((count - have) * M * 1.1) + 16
        size = min(size, 1 << 16) if analytic else min(size, 4 * BATCH)
        prop = math.sqrt(sigma2) * (rng.standard_normal(size) + 1j * rng.standard_normal(size))
        u = rng.random(size)
        dens_prop = outcome_densities(p, state, prop)
        bound = M * _envelope(prop, sigma2)
        bad = np.flatnonzero(dens_prop > bound * (1 + ENVELOPE_SLACK))
        if bad.size:
            b = complex(prop[bad[0]])
            raise EnvelopeError(f"density {dens_prop[bad[0]]!r} exceeds envelope {bound[bad[0]]!r} at beta={b!r}")
        keep = u * bound < dens_prop
        proposed += size
        accepted += int(keep.sum())
        take = min(count - have, int(keep.sum()))
        betas.append(prop[keep][:take])
        dens.append(dens_prop[keep][:take])
        have += take
    return np.concatenate(betas), np.concatenate(dens), accepted, proposed


def sample_outcomes(
    p: TeleportParams, state: FockVector, count: int, seed: int, workers: int = 1
) -> SampleBatch:
    """Draw ``count`` i.i.d. outcomes from P(beta) by rejection from a Gaussian envelope.

    The proposal is an isotropic complex Gaussian with per-component variance
    1/(1-q^2). Work is split over ``workers`` streams seeded by (seed, worker);
    the merged batch depends only on (seed, workers).
    """
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    if workers < 1:
        raise DomainError(f"workers must be positive, got {workers}")
    _check_input(p, state)
    sigma2 = _envelope_sigma2(p.q)
    M = envelope_constant(p, state)
    counts = [count // workers + (w < count % workers) for w in range(workers)]
    jobs = [(p, state, c, seed, w, M, sigma2) for w, c in enumerate(counts) if c > 0]
    if workers == 1:
        parts = [_worker_draw(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _worker_draw(*job), jobs))
    accepted = sum(part[2] for part in parts)
    proposed = sum(part[3] for part in parts)
    return SampleBatch(
        seed=seed,
        betas=np.concatenate([part[0] for part in parts]),
        densities=np.concatenate([part[1] for part in parts]),
        acceptance_rate=accepted / proposed,
        envelope_constant=M,
    )


@dataclass(frozen=True)
class OutcomeObservables:
    """Per-outcome properties of the normalized conditional output."""

    density: np.ndarray
    coherence: np.ndarray
    fidelity: np.ndarray
    mean_photon_number: np.ndarray
    tail_mass: np.ndarray


def outcome_observables(p: TeleportParams, state: FockVector, betas, strict: bool = True) -> OutcomeObservables:
    """Field amplitude, fidelity to the input, photon number and tail mass per outcome.

    Zero-density outcomes raise unless ``strict`` is False, in which case their
    observables are NaN.
    """
    betas = np.atleast_1d(np.asarray(betas, dtype=complex))
    n = np.arange(p.cutoff)
    top = max(1, math.ceil(p.cutoff / 10))
    sqrt_n = np.sqrt(n[1:])
    dens = np.empty(betas.size)
    coh = np.empty(betas.size, dtype=complex)
    fid = np.empty(betas.size)
    mean_n = np.empty(betas.size)
    tail = np.empty(betas.size)
    for start in range(0, betas.size, BATCH):
        sl = slice(start, start + BATCH)
        vecs, d = channel_batch(p, betas[sl], state)
        dead = d <= MIN_DENSITY
        if strict and dead.any():
            bad = betas[sl][np.argmax(dead)]
            raise DegenerateOutcomeError(f"outcome beta={complex(bad)!r} has vanishing density")
        with np.errstate(divide="ignore", invalid="ignore"):
            vecs = np.where(dead[:, None], np.nan, vecs / np.sqrt(d)[:, None])
        probs = np.abs(vecs) ** 2
        dens[sl] = d
        coh[sl] = np.sum(vecs[:, :-1].conj() * sqrt_n * vecs[:, 1:], axis=1)
        fid[sl] = np.abs(vecs @ state.amplitudes.conj()) ** 2
        mean_n[sl] = probs @ n
        tail[sl] = probs[:, -top:].sum(axis=1)
    return OutcomeObservables(dens, coh, fid, mean_n, tail)


@dataclass(frozen=True)
class CoherenceSummary:
    count: int
    mean: complex
    variance: float
    mean_abs: float
    mean_photon_number: float
    mean_fidelity: float


def coherence_statistics(p: TeleportParams, state: FockVector, batch: SampleBatch) -> CoherenceSummary:
    """Aggregate output field amplitudes over a batch of sampled outcomes.

    ``variance`` is E|C - E C|^2 over the batch.
    """
    if len(batch) == 0:
        raise DomainError("empty sample batch")
    obs = outcome_observables(p, state, batch.betas)
    mean = complex(np.mean(obs.coherence))
    return CoherenceSummary(
        count=len(batch),
        mean=mean,
        variance=float(np.mean(np.abs(obs.coherence - mean) ** 2)),
        mean_abs=float(np.mean(np.abs(obs.coherence))),
        mean_photon_number=float(np.mean(obs.mean_photon_number)),
        mean_fidelity=float(np.mean(obs.fidelity)),
    )
