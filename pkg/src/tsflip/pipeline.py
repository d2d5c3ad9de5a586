"""End-to-end privatization of a sensitive series against an attacker's series."""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from ._json import jsonable
from .allpass import AllPassFilter, apply_filter, design_filter, forecast_backcast_extend
from .errors import FlipError, LengthMismatchError, PerfectPredictionError, SeriesTooShortError
from .metrics import PrivacyReport, d_acf, d_path, lip_allpass, lip_general, sample_acf, noise_baseline_attenuation
from .phase import PhaseFunction, RConfig, design_phase, draw_r
from .series import TimeSeries, as_series, detrend_ols, extrapolate_trend, standardize
from .spectra import (
    FrequencyGrid,
    SpectralDensity,
    SpectralMatrix,
    conditional_spectrum,
    fit_var,
    flat_top_spectral_matrix,
    var_spectral_matrix,
)


@dataclass(frozen=True)
class FlipConfig:
    """Settings for :func:`flip_privatize`.

    ``estimator`` is ``"var:<p>"`` (VAR(p) spectral matrix) or ``"flattop"``.
    ``mode="detrend"`` filters the detrended residuals and adds the fitted
    trend back; ``mode="direct"`` filters the trend-carrying observations
    (extended with extrapolated trend), relying on trend invariance of the
    filter. ``unwrap=False`` factors the wrapped phase literally.
    """

    delta: float = 0.0
    d: int = 0
    K: int = 25
    M: int = 45
    N: int = 2048
    estimator: str = "var:1"
    threshold_C: float | None = None
    H: int = 24
    standardize: bool = False
    mode: str = "detrend"
    unwrap: bool = True
    r: RConfig = field(default_factory=RConfig)

    def __post_init__(self):
        if not 0 <= self.delta < 1:
            raise ValueError(f"delta must satisfy 0 <= delta < 1, got {self.delta}")
        if not 0 <= self.d <= 5:
            raise ValueError("trend order must lie in 0..5")
        if self.K < 1 or self.K > self.N // 4:
            raise ValueError(f"K must lie in 1..N/4 (N={self.N})")
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if self.mode not in ("detrend", "direct"):
            raise ValueError("mode must be 'detrend' or 'direct'")
        parse_estimator(self.estimator)
        if self.M < self.K:
            warnings.warn(f"M={self.M} is below K={self.K}", stacklevel=3)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["r"] = asdict(self.r)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FlipConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if isinstance(d.get("r"), dict):
            r = dict(d["r"])
            if r.get("components") is not None:
                r["components"] = tuple(tuple(c) for c in r["components"])
            if "b_extra" in r:
                r["b_extra"] = tuple(r["b_extra"])
            d["r"] = RConfig(**r)
        return cls(**d)


def parse_estimator(spec: str):
    if spec == "flattop":
        return ("flattop", None)
    if spec.startswith("var:"):
        try:
            p = int(spec[4:])
        except ValueError:
            p = 0
        if p >= 1:
            return ("var", p)
    raise ValueError(f"estimator must be 'var:<p>' or 'flattop', got {spec!r}")


@dataclass
class FlipResult:
    privatized: TimeSeries
    report: PrivacyReport
    filter: AllPassFilter
    provenance: dict
    residuals: np.ndarray
    privatized_residuals: np.ndarray
    spectral_matrix: SpectralMatrix
    residual_spectrum: SpectralDensity
    phase: PhaseFunction

    def provenance_json(self) -> str:
        return json.dumps(jsonable(self.provenance), indent=2, sort_keys=True) + "\n"


def estimate_spectral_matrix(rx, rz, config: FlipConfig, grid: FrequencyGrid):
    kind, p = parse_estimator(config.estimator)
    if kind == "var":
        model = fit_var(rx, rz, p)
        info = {"estimator": f"var:{p}", "coefs": model.coefs, "sigma": model.sigma}
        return var_spectral_matrix(model, grid), info
    F = flat_top_spectral_matrix(rx, rz, grid, C=config.threshold_C)
    return F, {"estimator": "flattop", "threshold_C": config.threshold_C, "psd_repairs": F.clipped}


def flip_privatize(x, z, config: FlipConfig | None = None, rng=None) -> FlipResult:
    """Privatize ``x`` with a randomized delta-LIP all-pass filter.

    Steps: detrend both series at order ``d`` and estimate their spectral
    matrix from the residuals; form the residual spectrum of X given Z; draw
    R, the budget shift and the phase; compute cepstral and impulse
    coefficients; extend the residuals by M backcasts and forecasts; filter;
    restore the trend (and the scale, in standardized mode).

    ``rng`` is a :class:`numpy.random.Generator` or a seed.
    """
    config = config or FlipConfig()
    rng = np.random.default_rng(rng)
    x = as_series(x, "x")
    z = as_series(z, "z")
    T = x.T
    if z.T != T:
        raise LengthMismatchError(f"x has {T} points, z has {z.T}")
    d = config.d
    if T < max(30, 2 * (d + 2)):
        raise SeriesTooShortError(f"need T >= {max(30, 2 * (d + 2))}, got {T}")
    if T < 4 * config.M / 3:
        warnings.warn(f"T={T} is short relative to M={config.M}", stacklevel=2)

    st_x = st_z = None
    xs, zs = x, z
    if config.standardize:
        xs, st_x = standardize(x)
        zs, st_z = standardize(z)

    fit_x = detrend_ols(xs, d)
    fit_z = detrend_ols(zs, d)
    rx = fit_x.residuals
    scale = max(1.0, float(np.max(np.abs(xs.values))))
    if float(np.std(rx.values)) <= 1e-12 * scale:
        raise PerfectPredictionError(
            f"sensitive series has no stationary component after order-{d} detrending")

    grid = FrequencyGrid(config.N)
    F, est_info = estimate_spectral_matrix(rx, fit_z.residuals, config, grid)
    f_cond = conditional_spectrum(F)

    R = draw_r(rng, d, config.r)
    try:
        phase, h, budget = design_phase(f_cond, R, config.delta, rng)
    except FlipError as exc:
        raise type(exc)(f"{exc}; choose a smaller delta or a different neighborhood") from exc
    filt = design_filter(phase, config.K, config.M, unwrap=config.unwrap)

    M = config.M
    ext = forecast_backcast_extend(rx, F.marginal_x(), M)
    if config.mode == "detrend":
        out_resid = apply_filter(filt, ext, T, M)
        out = fit_x.fitted.values + out_resid
    else:
        pre, post = extrapolate_trend(fit_x, M)
        trend_ext = np.concatenate([pre, fit_x.fitted.values, post])
        out = apply_filter(filt, ext.values + trend_ext, T, M)
        out_resid = out - fit_x.fitted.values

    if st_x is not None:
        out = st_x.invert(out)

    report = PrivacyReport(
        lip=lip_allpass(phase, f_cond),
        lip_truncated=lip_general(filt.response(grid.points), f_cond),
        delta=config.delta,
        d_path=d_path(rx, out_resid),
        d_acf=d_acf(rx, out_resid, config.H),
        H=config.H,
        B=budget.B,
        Delta=budget.draw,
    )
    provenance = {
        "version": __version__,
        "config": config.to_dict(),
        "T": T,
        "R": R.to_dict(),
        "budget": budget.to_dict(),
        "spectral_estimate": est_info,
        "filter": {"K": config.K, "M": M, "shift": filt.shift,
                   "unitarity_defect": filt.unitarity_defect,
                   "truncation_bound": filt.cepstral.truncation_bound},
        "extension_ridge": ext.ridge,
        "trend": {"order": d, "x": fit_x.coefficients, "z": fit_z.coefficients},
        "standardization": None if st_x is None else {
            "x": {"mean": st_x.mean, "sd": st_x.sd}, "z": {"mean": st_z.mean, "sd": st_z.sd}},
    }
    report.provenance = provenance
    object.__setattr__(filt, "provenance", provenance)
    return FlipResult(
        privatized=x.with_values(out),
        report=report,
        filter=filt,
        provenance=provenance,
        residuals=rx.values,
        privatized_residuals=out_resid,
        spectral_matrix=F,
        residual_spectrum=f_cond,
        phase=phase,
    )


@dataclass
class NoiseComparison:
    snr: float
    attenuation: float
    acf1_original: float
    acf1_noise: float
    acf1_flip: float
    d_acf_noise: float
    d_acf_flip: float
    d_path_noise: float
    d_path_flip: float
    flip: FlipResult = field(repr=False)

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "flip"}
        d["flip_report"] = self.flip.report.to_dict()
        return jsonable(d)


def flip_compare_noise(x, z, config: FlipConfig | None = None, snr: float = 1.0, rng=None) -> NoiseComparison:
    """Run FLIP and i.i.d. Gaussian noise addition at signal-to-noise ratio ``snr``.

    Noise with variance ``gamma_X(0) / snr`` is added to the detrended
    sensitive series; both outputs are scored against it with the same H.
    """
    config = config or FlipConfig()
    rng = np.random.default_rng(rng)
    if not snr > 0:
        raise ValueError("snr must be positive")
    flip_rng, noise_rng = rng.spawn(2)
    res = flip_privatize(x, z, config, flip_rng)
    rx = res.residuals
    gx0 = float(np.var(rx))
    noisy = rx + noise_rng.normal(0.0, np.sqrt(gx0 / snr), rx.size)
    return NoiseComparison(
        snr=float(snr),
        attenuation=noise_baseline_attenuation(gx0, gx0 / snr),
        acf1_original=float(sample_acf(rx, 1)[1]),
        acf1_noise=float(sample_acf(noisy, 1)[1]),
        acf1_flip=float(sample_acf(res.privatized_residuals, 1)[1]),
        d_acf_noise=d_acf(rx, noisy, config.H),
        d_acf_flip=res.report.d_acf,
        d_path_noise=d_path(rx, noisy),
        d_path_flip=res.report.d_path,
        flip=res,
    )
