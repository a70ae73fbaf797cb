"""Spectra of Robin Laplacians near power-law peaks."""

from ._core import (
    BudgetExceeded,
    CapBC,
    CertificateFailure,
    LadderExhausted,
    ComputationError,
    OneDParams,
    PeakModelParams,
    Spectrum,
    __version__,
    ball_lambda,
    count_Q_below,
    counting_function,
    eigenvalues_A1,
    ground_state_ball,
    ground_state_interval,
    phase_integral,
    phase_integral_closed_form,
    physical_alpha_spectrum,
    predicted_count,
    run_cli,
    run_counting_experiment,
    run_theorem1_experiment,
    run_theorem2_experiment,
    second_eigenvalue_disk,
    shooting_oracle,
    spectrum_Q,
    spectrum_T,
    threshold_count_coeff,
    weyl_J,
)

__all__ = [n for n in dir() if not n.startswith("_")] + ["__version__"]
