"""Continuous-variable teleportation of photon-number states on a truncated Fock space."""
from .analytic import (
    CoherenceValue,
    coherence_analytic,
    coherence_peak,
    single_photon_density,
    single_photon_output_normalized,
    single_photon_output_unnormalized,
)
from .channel import (
    MeasurementOutcome,
    TeleportParams,
    apply_channel,
    completeness_defect,
    conditional_output,
    transfer_operator,
)
from .fock import (
    ComplexOperator,
    FockVector,
    annihilation_operator,
    apply,
    basis_state,
    coherent_state,
    displacement_closed_form,
    displacement_exponential,
    field_expectation,
    inner_product,
)
from .quadrature import QuadratureGrid, polar_grid
from .sampling import SampleBatch, coherence_statistics, integrate_density, sample_outcomes

__version__ = "0.1.0"
