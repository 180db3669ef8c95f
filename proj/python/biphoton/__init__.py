"""Counterpropagating SPDC source: spectra, HOM interferograms, fitting and tomography.

Quantities are SI (m, s, rad/s) throughout.
"""

from ._core import (
    BiphotonError,
    DispersionModel,
    JointSpectrum,
    PumpConfig,
    WaveguideConfig,
    build_joint_spectrum,
    cavity_interferogram,
    cavity_joint_spectrum,
    coincidence_closed_form,
    coincidence_quadrature,
    density_matrix,
    effective_visibility,
    entanglement_metrics,
    envelope_width,
    facet_amplitudes,
    fit_interferogram,
    fit_model,
    group_velocity,
    intra_mode_width,
    marginal_spectra,
    modal_index,
    population_p,
    run_cli,
    solve_central_frequencies,
    spectral_separation_mu,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
