import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from cvteleport import sampling
from cvteleport.analytic import coherence_analytic, single_photon_density
from cvteleport.channel import TeleportParams
from cvteleport.errors import DomainError, EnvelopeError, QuadratureError
from cvteleport.fock import FockVector, basis_state
from cvteleport.quadrature import QuadratureGrid, polar_grid
from cvteleport.sampling import (
    SampleBatch,
    coherence_statistics,
    integrate_density,
    integrate_density_with_error,
    sample_outcomes,
    single_photon_envelope_constant,
)


@given(
    radius=st.floats(min_value=0.0, max_value=50.0),
    radial=st.integers(1, 64),
    angular=st.integers(1, 64),
)
def test_grid_reproduces_disk_area(radius, radial, angular):
    g = polar_grid(radius, radial, angular)
    assert g.integrate(np.ones(g.shape)) == pytest.approx(math.pi * radius**2, rel=1e-12, abs=1e-12)


def test_grid_rejects_wrong_area():
    g = polar_grid(2.0, 8, 8)
    with pytest.raises(QuadratureError, match="area"):
        QuadratureGrid(g.radial_nodes, g.radial_weights * 1.01, 8, 2.0)


@pytest.mark.parametrize("radial, angular", [(0, 8), (8, 0)])
def test_degenerate_grid(radial, angular):
    with pytest.raises(QuadratureError):
        polar_grid(1.0, radial, angular)


def test_grid_integrates_gaussian():
    g = polar_grid(8.0, 64, 16)
    vals = np.exp(-np.abs(g.points()) ** 2)
    assert g.integrate(vals) == pytest.approx(math.pi, abs=1e-12)


def test_vacuum_density_normalization():
    val = integrate_density(TeleportParams(0.0), basis_state(0), polar_grid(8.0, 64, 64))
    assert val == pytest.approx(1.0, abs=1e-6)


def test_single_photon_density_normalization():
    val = integrate_density(TeleportParams(0.5), basis_state(1), polar_grid(12.0, 96, 64))
    assert val == pytest.approx(1.0, abs=1e-4)


def test_empty_disk_has_no_probability():
    assert integrate_density(TeleportParams(0.5), basis_state(1), polar_grid(0.0, 8, 8)) == 0.0


def test_non_isotropic_input_density_on_grid():
    # (|0> + |1>)/sqrt2 is not phase symmetric; compare grid values to per-point channel calls
    from cvteleport.channel import apply_channel

    psi = FockVector(np.r_[1, 1, np.zeros(62)] / math.sqrt(2))
    p = TeleportParams(0.4)
    g = polar_grid(3.0, 4, 5)
    dens = sampling.density_on_grid(p, psi, g)
    pts = g.points()
    for i in range(4):
        for j in range(5):
            assert dens[i, j] == pytest.approx(apply_channel(p, pts[i, j], psi)[1], rel=1e-10)
    assert integrate_density(p, psi, polar_grid(p.default_radius, 96, 64)) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("q", [0.0, 0.5, 0.8])
@pytest.mark.parametrize("nodes", [(8, 4), (12, 8), (24, 16)])
def test_refinement_stays_within_error_estimate(q, nodes):
    p = TeleportParams(q)
    g = polar_grid(p.default_radius, *nodes)
    value, err = integrate_density_with_error(p, basis_state(1), g)
    assert abs(integrate_density(p, basis_state(1), g.refined()) - value) <= err


def test_single_photon_envelope_constant_is_supremum():
    for q in (0.0, 0.3, 0.5, 0.8, 0.95):
        r = np.linspace(0, 30, 300001)
        sigma2 = 1 / (1 - q**2)
        ratio = single_photon_density(q, r) / (np.exp(-(r**2) / (2 * sigma2)) / (2 * math.pi * sigma2))
        assert single_photon_envelope_constant(q) == pytest.approx(ratio.max(), rel=1e-9)
        assert ratio.max() <= single_photon_envelope_constant(q) * (1 + 1e-12)


def test_q0_radial_moment():
    # at q = 0 the single-photon density is |beta|^2 e^{-|beta|^2}/pi: |beta|^2 ~ Gamma(2, 1)
    batch = sample_outcomes(TeleportParams(0.0), basis_state(1), 100_000, seed=11)
    assert len(batch) == 100_000
    assert np.mean(np.abs(batch.betas) ** 2) == pytest.approx(2.0, abs=0.02)
    assert 0 < batch.acceptance_rate <= 1
    ks = stats.kstest(np.abs(batch.betas) ** 2, stats.gamma(2).cdf)
    assert ks.pvalue > 1e-3


def test_angles_are_uniform():
    batch = sample_outcomes(TeleportParams(0.0), basis_state(1), 100_000, seed=5)
    counts, _ = np.histogram(np.angle(batch.betas), bins=16, range=(-math.pi, math.pi))
    assert stats.chisquare(counts).pvalue > 1e-3


def test_determinism():
    p = TeleportParams(0.5)
    a = sample_outcomes(p, basis_state(1), 1, seed=3)
    b = sample_outcomes(p, basis_state(1), 1, seed=3)
    assert a.betas[0] == b.betas[0]
    a = sample_outcomes(p, basis_state(1), 500, seed=3, workers=3)
    b = sample_outcomes(p, basis_state(1), 500, seed=3, workers=3)
    assert a.to_bytes() == b.to_bytes()
    assert a.to_bytes() != sample_outcomes(p, basis_state(1), 500, seed=4, workers=3).to_bytes()


def test_worker_split_reuses_streams():
    p = TeleportParams(0.5)
    one = sample_outcomes(p, basis_state(1), 300, seed=9, workers=1)
    two = sample_outcomes(p, basis_state(1), 600, seed=9, workers=2)
    # worker 0 of the split batch is the same stream as the single-worker batch
    np.testing.assert_array_equal(two.betas[:300], one.betas)


def test_outcomes_carry_exact_density():
    p = TeleportParams(0.3)
    batch = sample_outcomes(p, basis_state(1), 200, seed=1)
    outs = batch.outcomes
    assert len(outs) == 200
    for o in outs[:20]:
        assert o.density == pytest.approx(single_photon_density(0.3, o.beta), rel=1e-14)


def test_general_input_uses_numeric_density():
    psi = FockVector(np.r_[1, 0, 1, np.zeros(61)] / math.sqrt(2))
    p = TeleportParams(0.5)
    batch = sample_outcomes(p, psi, 400, seed=2)
    from cvteleport.channel import apply_channel

    for b, d in zip(batch.betas[:10], batch.densities[:10]):
        assert d == pytest.approx(apply_channel(p, b, psi)[1], rel=1e-12)
    assert batch.envelope_constant > 0


def test_envelope_violation_is_reported(monkeypatch):
    monkeypatch.setattr(sampling, "single_photon_envelope_constant", lambda q: 0.05)
    with pytest.raises(EnvelopeError, match="beta="):
        sample_outcomes(TeleportParams(0.5), basis_state(1), 100, seed=0)


def test_sample_rejects_bad_count():
    with pytest.raises(DomainError):
        sample_outcomes(TeleportParams(0.5), basis_state(1), 0, seed=0)


def test_coherence_mean_vanishes_by_isotropy():
    p = TeleportParams(0.5)
    batch = sample_outcomes(p, basis_state(1), 100_000, seed=21)
    summary = coherence_statistics(p, basis_state(1), batch)
    assert abs(summary.mean) <= 0.02
    # E|C| against radial quadrature of P1 |C|
    ref, _ = integrate.quad(
        lambda r: 2 * math.pi * r * single_photon_density(0.5, r) * abs(coherence_analytic(0.5, r).value), 0, 30
    )
    assert summary.mean_abs == pytest.approx(ref, rel=0.01)
    assert summary.mean_photon_number > 1.0


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_q0_coherence_equals_outcome(seed):
    p = TeleportParams(0.0)
    batch = sample_outcomes(p, basis_state(1), 50, seed=seed)
    obs = sampling.outcome_observables(p, basis_state(1), batch.betas)
    np.testing.assert_allclose(obs.coherence, batch.betas, atol=1e-10)


def test_forced_origin_outcome():
    p = TeleportParams(0.5)
    batch = SampleBatch(seed=0, betas=np.array([0j]), densities=np.array([0.0596831]), acceptance_rate=1.0, envelope_constant=1.0)
    summary = coherence_statistics(p, basis_state(1), batch)
    assert summary.mean == 0
    assert summary.mean_fidelity == pytest.approx(1.0, abs=1e-15)


def test_empty_batch():
    batch = SampleBatch(0, np.array([], dtype=complex), np.array([]), 1.0, 1.0)
    with pytest.raises(DomainError):
        coherence_statistics(TeleportParams(0.5), basis_state(1), batch)
