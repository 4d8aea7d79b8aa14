"""Figure sweep, verification suites and sample export behind the CLI."""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import analytic, channel, fock
from .channel import TeleportParams
from .errors import DomainError
from .quadrature import polar_grid
from .sampling import integrate_density, outcome_observables, sample_outcomes

SWEEP_CHUNK = 64
ORACLE_QS = (0.0, 0.25, 0.5, 0.75, 0.9)
ORACLE_BETAS = (0, 0.5, -0.5, 1, -1, 2, -2, 1 + 1j, -0.5j)


@dataclass
class RunConfig:
    q: float = 0.5
    cutoff: int = fock.DEFAULT_CUTOFF
    beta_max: float = 10.0
    steps: int = 201
    seed: int = 1
    tolerance: float = 1e-8
    output_path: str = "out.csv"
    count: int = 1000
    workers: int = 1
    angles: int = 0

    def validate(self) -> RunConfig:
        if not (0.0 <= self.q < 1.0):
            raise DomainError(f"q must satisfy 0 <= q < 1 (q = 1 is the singular maximal-entanglement limit), got {self.q}")
        if not (2 <= self.cutoff <= fock.MAX_CUTOFF):
            raise DomainError(f"cutoff must be in 2..{fock.MAX_CUTOFF}, got {self.cutoff}")
        if not (self.beta_max > 0 and math.isfinite(self.beta_max)):
            raise DomainError(f"beta_max must be positive, got {self.beta_max}")
        if self.steps < 2:
            raise DomainError(f"steps must be >= 2, got {self.steps}")
        if self.seed < 0:
            raise DomainError(f"seed must be non-negative, got {self.seed}")
        if not self.tolerance > 0:
            raise DomainError(f"tolerance must be positive, got {self.tolerance}")
        if self.count < 1 or self.workers < 1 or self.angles < 0:
            raise DomainError("count and workers must be positive, angles non-negative")
        return self

    @property
    def params(self) -> TeleportParams:
        return TeleportParams(self.q, self.cutoff)


@dataclass
class SweepRecord:
    q: float
    beta_re: float
    beta_im: float
    density: float
    coherence_re: float
    coherence_im: float
    coherence_analytic_re: float
    coherence_analytic_im: float
    fidelity_to_input: float
    mean_photon_number: float
    tail_mass: float
    asymptote_re: float
    asymptote_im: float
    flagged: int = field(default=0)


SWEEP_COLUMNS = [f.name for f in fields(SweepRecord)]
SAMPLE_COLUMNS = ["beta_re", "beta_im", "density", "coherence_abs", "fidelity"]


def format_value(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.16e}"


def write_csv(path: str, columns: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def sweep_betas(config: RunConfig) -> np.ndarray:
    """Real |beta| grid, or a polar grid (radius-major) when ``angles`` > 0."""
    radii = np.linspace(0.0, config.beta_max, config.steps)
    if config.angles == 0:
        return radii.astype(complex)
    theta = 2 * np.pi * np.arange(config.angles) / config.angles
    return (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()


def _analytic_coherence(q: float, beta: complex) -> complex:
    if q == 0 and beta == 0:
        return complex(math.nan, math.nan)
    return analytic.coherence_analytic(q, beta).value


def _sweep_chunk(config: RunConfig, betas: np.ndarray) -> list[SweepRecord]:
    one = fock.basis_state(1, config.cutoff)
    obs = outcome_observables(config.params, one, betas, strict=False)
    records = []
    for i, beta in enumerate(betas):
        num = obs.coherence[i]
        ana = _analytic_coherence(config.q, beta)
        dev = abs(num - ana)
        asym = (1 - config.q) * beta
        records.append(
            SweepRecord(
                q=config.q,
                beta_re=beta.real,
                beta_im=beta.imag,
                density=obs.density[i],
                coherence_re=num.real,
                coherence_im=num.imag,
                coherence_analytic_re=ana.real,
                coherence_analytic_im=ana.imag,
                fidelity_to_input=obs.fidelity[i],
                mean_photon_number=obs.mean_photon_number[i],
                tail_mass=obs.tail_mass[i],
                asymptote_re=asym.real,
                asymptote_im=asym.imag,
                flagged=int(not dev <= config.tolerance),
            )
        )
    return records


def fig2_sweep(config: RunConfig) -> list[SweepRecord]:
    """Output coherence for input |1> along a |beta| grid, in grid order."""
    betas = sweep_betas(config)
    # chunking is independent of the worker count so output bytes do not depend on it
    chunks = [betas[i:i + SWEEP_CHUNK] for i in range(0, betas.size, SWEEP_CHUNK)]
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        parts = pool.map(lambda c: _sweep_chunk(config, c), chunks)
        return [rec for part in parts for rec in part]


def write_sweep(path: str, records: list[SweepRecord]) -> None:
    write_csv(path, SWEEP_COLUMNS, (asdict(r).values() for r in records))


@dataclass
class SuiteResult:
    name: str
    measured: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.measured <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{self.name} {status} {self.measured:.6e} {self.tolerance:.1e}"
        return f"{text} {self.detail}" if self.detail else text


def _check_betas(config: RunConfig) -> list[complex]:
    betas = [complex(b) for b in ORACLE_BETAS if abs(b) <= config.beta_max]
    if all(abs(abs(b) - config.beta_max) > 1e-12 for b in betas):
        betas.append(complex(config.beta_max))
    return betas


def _suite_displacement(config):
    worst = 0.0
    half = config.cutoff // 2
    for b in _check_betas(config):
        if abs(b) > 2:
            continue
        a = fock.displacement_closed_form(b, config.cutoff).entries[:half, :half]
        e = fock.displacement_exponential(b, config.cutoff).entries[:half, :half]
        worst = max(worst, float(np.max(np.abs(a - e))))
    return worst


def _suite_unitarity(config):
    worst = 0.0
    top = min(16, config.cutoff - 1)
    for b in _check_betas(config):
        if abs(b) > 2:
            continue
        dd = fock.displacement_closed_form(b, config.cutoff) @ fock.displacement_closed_form(-b, config.cutoff)
        worst = max(worst, float(np.max(np.abs(dd.entries[:, : top + 1] - np.eye(config.cutoff)[:, : top + 1]))))
    return worst


def _oracle_pairs(config):
    for q in sorted(set(ORACLE_QS) | {config.q}):
        for b in _check_betas(config):
            yield TeleportParams(q, config.cutoff), b


def _suite_eq3(config):
    worst = 0.0
    for p, b in _oracle_pairs(config):
        one = fock.basis_state(1, p.cutoff)
        vec, _ = channel.apply_channel(p, b, one)
        ref = analytic.single_photon_output_unnormalized(p.q, b, p.cutoff)
        worst = max(worst, float(np.linalg.norm(vec.amplitudes - ref.amplitudes)))
    return worst


def _suite_eq5(config):
    worst = 0.0
    for p, b in _oracle_pairs(config):
        if p.q == 0 and b == 0:
            continue
        out = channel.conditional_output(p, b, fock.basis_state(1, p.cutoff))
        worst = max(worst, abs(fock.field_expectation(out) - analytic.coherence_analytic(p.q, b).value))
    return worst


def _suite_normalization(config):
    p = config.params
    grid = polar_grid(12 / math.sqrt(1 - p.q**2), 96, 64)
    return abs(integrate_density(p, fock.basis_state(1, p.cutoff), grid) - 1.0)


def _suite_completeness(config):
    p = config.params
    return channel.completeness_defect(p, p.default_radius, (96, 64), block=min(8, p.cutoff // 2))


def _suite_truncation(config):
    p = config.params
    betas = [b for b in _check_betas(config) if not (p.q == 0 and b == 0)]
    obs = outcome_observables(p, fock.basis_state(1, p.cutoff), betas)
    return float(np.max(obs.tail_mass))


SUITES = (
    ("displacement_cross_check", _suite_displacement, 1e-9),
    ("displacement_unitarity", _suite_unitarity, 1e-8),
    ("channel_vs_single_photon_form", _suite_eq3, 1e-9),
    ("coherence_vs_field_expectation", _suite_eq5, None),
    ("probability_normalization", _suite_normalization, 1e-4),
    ("completeness_defect", _suite_completeness, 1e-4),
    ("truncation_tail_mass", _suite_truncation, 1e-12),
)


def run_checks(config: RunConfig) -> list[SuiteResult]:
    """Run every verification suite; a suite that raises is reported as failed."""
    results = []
    for name, fn, tol in SUITES:
        tol = config.tolerance if tol is None else tol
        try:
            results.append(SuiteResult(name, float(fn(config)), tol))
        except (ArithmeticError, ValueError) as exc:
            results.append(SuiteResult(name, math.inf, tol, f"error: {type(exc).__name__}: {exc}"))
    return results


def write_report(path: str, results: list[SuiteResult]) -> None:
    passed = sum(r.passed for r in results)
    status = "PASS" if passed == len(results) else "FAIL"
    with open(path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(r.line() + "\n")
        fh.write(f"summary {status} {passed}/{len(results)}\n")


def sample_rows(config: RunConfig):
    """Sampled outcomes for input |1> with per-outcome coherence and fidelity.

    Outputs come from the closed single-photon form, which needs only the small
    displacement (1-q) beta; for q near 1 the sampled |beta|^2 ~ 2/(1-q^2) far
    exceeds any usable cutoff of the full channel.
    """
    p = config.params
    one = fock.basis_state(1, p.cutoff)
    batch = sample_outcomes(p, one, config.count, config.seed, workers=config.workers)
    obs = analytic.single_photon_observables(p.q, batch.betas, p.cutoff)
    return batch, [
        (b.real, b.imag, d, abs(c), f)
        for b, d, c, f in zip(batch.betas, batch.densities, obs[0], obs[1])
    ]
