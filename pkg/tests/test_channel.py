import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvteleport.analytic import single_photon_output_normalized
from cvteleport.channel import (
    MeasurementOutcome,
    TeleportParams,
    apply_channel,
    completeness_defect,
    conditional_output,
    transfer_operator,
)
from cvteleport.errors import DegenerateOutcomeError, DomainError, PreconditionError
from cvteleport.fock import FockVector, basis_state, coherent_state, displacement_closed_form, inner_product


@pytest.mark.parametrize("q", [-0.1, 1.0, 1.5, math.nan])
def test_params_reject_bad_q(q):
    with pytest.raises(DomainError):
        TeleportParams(q)


def test_params_defaults_and_residual():
    p = TeleportParams(0.9)
    assert p.sum_terms == p.cutoff == 64
    assert p.series_residual == pytest.approx(0.9**64 / 0.1)
    assert TeleportParams(0.8).series_residual < 1e-5
    assert TeleportParams(0.5).series_residual < 1e-18
    with pytest.raises(DomainError):
        TeleportParams(0.5, cutoff=8, sum_terms=9)


def test_outcome_density_must_be_non_negative():
    with pytest.raises(DomainError):
        MeasurementOutcome(0.3, -1e-3)


@pytest.mark.parametrize("beta", [0, 0.7, 1 - 1.2j])
def test_q0_transfer_operator_is_rank_one(beta):
    s = np.linalg.svd(transfer_operator(TeleportParams(0.0), beta).entries, compute_uv=False)
    assert s[1] <= 1e-10
    assert s[0] == pytest.approx(1 / math.sqrt(math.pi), abs=1e-12)


def test_transfer_operator_at_origin_is_diagonal():
    t = transfer_operator(TeleportParams(0.5), 0).entries
    expected = math.sqrt(0.75 / math.pi) * 0.5 ** np.arange(64)
    np.testing.assert_allclose(t, np.diag(expected), atol=1e-15)


def test_transfer_operator_covariance():
    p = TeleportParams(0.5)
    d = displacement_closed_form(1.0, 64).entries
    dm = displacement_closed_form(-1.0, 64).entries
    shifted = d @ transfer_operator(p, 0).entries @ dm
    assert np.max(np.abs(transfer_operator(p, 1.0).entries - shifted)) <= 1e-9


@settings(max_examples=25, deadline=None)
@given(
    q=st.floats(min_value=0.0, max_value=0.9),
    re=st.floats(min_value=-2, max_value=2),
    im=st.floats(min_value=-2, max_value=2),
)
def test_transfer_operator_covariance_property(q, re, im):
    beta = complex(re, im)
    p = TeleportParams(q)
    d = displacement_closed_form(beta, 64).entries
    shifted = d @ transfer_operator(p, 0).entries @ displacement_closed_form(-beta, 64).entries
    assert np.max(np.abs(transfer_operator(p, beta).entries - shifted)) <= 1e-9


def test_vacuum_density_at_q0():
    p = TeleportParams(0.0)
    _, density = apply_channel(p, 0, basis_state(0))
    assert density == pytest.approx(1 / math.pi, abs=1e-12)
    for beta in (0.5, 1 + 1j, -2):
        _, density = apply_channel(p, beta, basis_state(0))
        assert density == pytest.approx(math.exp(-abs(beta) ** 2) / math.pi, rel=1e-12)


def test_single_photon_density_at_origin():
    _, density = apply_channel(TeleportParams(0.5), 0, basis_state(1))
    assert density == pytest.approx(0.0596831036594608, abs=1e-12)


@pytest.mark.parametrize("q", [0.1, 0.5, 0.9])
def test_origin_outcome_leaves_single_photon(q):
    vec, density = apply_channel(TeleportParams(q), 0, basis_state(1))
    assert np.count_nonzero(vec.amplitudes) == 1
    assert vec.amplitudes[1] == pytest.approx(math.sqrt(density))
    out = conditional_output(TeleportParams(q), 0, basis_state(1))
    assert np.count_nonzero(out.amplitudes) == 1
    assert out.amplitudes[1] == pytest.approx(1.0, abs=1e-15)


def test_apply_channel_requires_normalized_input():
    with pytest.raises(PreconditionError):
        apply_channel(TeleportParams(0.5), 0.1, FockVector(np.r_[1, 1, np.zeros(62)]))


def test_q0_conditional_output_is_coherent():
    out = conditional_output(TeleportParams(0.0), 1.0, basis_state(1))
    fid = abs(inner_product(coherent_state(1.0), out)) ** 2
    assert fid >= 1 - 1e-9


def test_conditional_output_matches_normalized_form():
    out = conditional_output(TeleportParams(0.5), 1.0, basis_state(1))
    ref = single_photon_output_normalized(0.5, 1.0, 64)
    assert np.linalg.norm(out.amplitudes - ref.amplitudes) <= 1e-10
    assert out.is_normalized(1e-12)


def test_zero_density_outcome_raises():
    with pytest.raises(DegenerateOutcomeError):
        conditional_output(TeleportParams(0.0), 0, basis_state(1))


def test_completeness_q0():
    assert completeness_defect(TeleportParams(0.0), 8.0, (96, 64), block=8) <= 1e-6


def test_completeness_q_half():
    p = TeleportParams(0.5)
    assert completeness_defect(p, 8 / math.sqrt(1 - 0.25), (96, 64), block=8) <= 1e-4


def test_completeness_empty_disk():
    assert completeness_defect(TeleportParams(0.5), 0.0, block=8) == pytest.approx(1.0, abs=1e-15)


def test_completeness_improves_with_radius():
    p = TeleportParams(0.5)
    defects = [completeness_defect(p, r, (64, 32), block=8) for r in (1.0, 2.0, 4.0, 8.0)]
    assert defects == sorted(defects, reverse=True)


def test_completeness_default_block_is_half_cutoff():
    p = TeleportParams(0.3, cutoff=16)
    assert completeness_defect(p, 3.0) == completeness_defect(p, 3.0, block=8)
    with pytest.raises(DomainError):
        completeness_defect(p, 3.0, block=17)


@pytest.mark.parametrize("q", [0.0, 0.3, 0.5, 0.8])
def test_probability_normalization_by_direct_quadrature(q):
    # independent of sampling.integrate_density: plain per-point channel calls on a coarse polar grid
    radius = 8 / math.sqrt(1 - q**2)
    x, w = np.polynomial.legendre.leggauss(48)
    r = 0.5 * radius * (x + 1)
    wr = 0.5 * radius * w * r
    p = TeleportParams(q)
    total = 0.0
    for ri, wi in zip(r, wr):
        _, dens = apply_channel(p, ri, basis_state(1))
        total += 2 * math.pi * wi * dens  # density depends only on |beta| for number states
    assert total == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("beta", [0.3, 1.0, -2.0, 1.4 + 1.4j])
def test_strong_entanglement_keeps_photon(beta):
    out = conditional_output(TeleportParams(0.999), beta, basis_state(1))
    assert abs(out.amplitudes[1]) ** 2 >= 0.99
