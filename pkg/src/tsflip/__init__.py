"""Phase-randomizing all-pass filters for releasing time series with linear privacy guarantees."""

__version__ = "0.1.0"

from .allpass import AllPassFilter, CepstralCoeffs, apply_filter, cepstral_coeffs, cepstral_recursions, design_filter, forecast_backcast_extend
from .errors import FlipError
from .metrics import PrivacyReport, d_acf, d_path, lip_allpass, lip_general, noise_baseline_attenuation, sample_acf
from .phase import RConfig, RFunction, beta_mixture_r, compute_B, design_phase, draw_r, phase_function
from .pipeline import FlipConfig, FlipResult, flip_compare_noise, flip_privatize
from .series import TimeSeries, detrend_ols, load_csv, standardize
from .simulate import McConfig, riccati_var1, run_monte_carlo, simulate_var1
from .spectra import FrequencyGrid, SpectralDensity, SpectralMatrix, conditional_spectrum, fit_var, flat_top_spectral_matrix, spectral_cdf, var_spectral_matrix

import types as _types

__all__ = sorted(n for n, v in globals().items() if not n.startswith("_") and not isinstance(v, _types.ModuleType))
