"""Privacy and utility measures.

Linear incremental privacy of a filter ``Psi`` against residual spectrum
``f`` is one minus the squared correlation between ``X_t`` and the filtered
``Psi(B) X_t`` after both are projected off the attacker's series. For a real
filter and an even spectrum every inner product reduces to an integral over
[0, pi].
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ._json import dump_json
from .errors import LengthMismatchError, PerfectPredictionError, SeriesTooShortError, ZeroVarianceError
from .phase import PhaseFunction
from .series import as_series
from .spectra import SpectralDensity


def lip_general(response, f: SpectralDensity) -> float:
    """LIP of a real linear filter with frequency response ``response`` on f's grid.

    ``1 - <Psi, f>^2 / (<|Psi|^2, f> <f>)``, where ``<Psi, f>`` reduces to
    ``int_0^pi Re Psi f`` for real filter coefficients.
    """
    psi = np.asarray(response, dtype=complex)
    mass = f.total
    if not mass > 0:
        raise PerfectPredictionError("residual spectrum has zero mass")
    num = f.grid.integrate(psi.real * f.values)
    energy = f.grid.integrate(np.abs(psi) ** 2 * f.values)
    if not energy > 0:
        raise ValueError("filter output has zero variance")
    return float(np.clip(1.0 - num**2 / (energy * mass), 0.0, 1.0))


def lip_allpass(g, f: SpectralDensity) -> float:
    """LIP of the all-pass filter ``exp(i g)``: ``1 - (int cos(g) f / int f)^2``."""
    vals = g.values if isinstance(g, PhaseFunction) else np.asarray(g, dtype=float)
    mass = f.total
    if not mass > 0:
        raise PerfectPredictionError("residual spectrum has zero mass")
    c = f.grid.integrate(np.cos(vals) * f.values) / mass
    return float(np.clip(1.0 - c * c, 0.0, 1.0))


def _pair(x, xhat):
    x = as_series(x).values
    xhat = as_series(xhat).values
    if x.size != xhat.size:
        raise LengthMismatchError(f"lengths differ: {x.size} vs {xhat.size}")
    return x, xhat


def d_path(x, xhat) -> float:
    """Mean squared gap divided by the sample variance of ``x`` (divisor T)."""
    x, xhat = _pair(x, xhat)
    var = float(np.var(x))
    if not var > 0:
        raise ZeroVarianceError("original series has zero variance")
    return float(np.mean((x - xhat) ** 2) / var)


def sample_acf(x, max_lag: int) -> np.ndarray:
    x = as_series(x).values
    xc = x - x.mean()
    denom = float(xc @ xc)
    if not denom > 0:
        raise ZeroVarianceError("series has zero variance")
    T = x.size
    return np.array([xc[:T - h] @ xc[h:] for h in range(max_lag + 1)]) / denom


def d_acf(x, xhat, H: int = 24) -> float:
    """``H^{-1} sum_{h=0}^{H} (rho_h - rhohat_h)^2`` of sample autocorrelations."""
    x, xhat = _pair(x, xhat)
    H = int(H)
    if H < 1 or x.size <= H:
        raise SeriesTooShortError(f"need T > H >= 1 (T={x.size}, H={H})")
    r = sample_acf(x, H)
    rh = sample_acf(xhat, H)
    return float(np.sum((r - rh) ** 2) / H)


def noise_baseline_attenuation(gamma_x0: float, gamma_n0: float) -> float:
    """ACF attenuation ``SNR / (1 + SNR)`` caused by adding i.i.d. noise."""
    if not (gamma_x0 > 0 and gamma_n0 > 0):
        raise ValueError("variances must be positive")
    snr = gamma_x0 / gamma_n0
    return snr / (1.0 + snr)


@dataclass
class PrivacyReport:
    """Outcome of one privatization run.

    ``lip`` is the feasible privacy measure: the exact-phase LIP against the
    estimated residual spectrum. ``lip_truncated`` evaluates the finite
    impulse response actually applied.
    """

    lip: float
    delta: float
    d_path: float
    d_acf: float
    H: int = 24
    lip_truncated: float = float("nan")
    B: float | None = None
    Delta: float | None = None
    variance_basis: str = "sample variance of the detrended original"
    lip_kind: str = "feasible (estimated residual spectrum)"
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, path) -> None:
        dump_json(path, self.to_dict())

    def table(self) -> str:
        rows = [("LIP", self.lip), ("LIP (truncated filter)", self.lip_truncated),
                ("delta", self.delta), ("D_path", self.d_path), (f"D_ACF (H={self.H})", self.d_acf)]
        return "\n".join(f"{k:<24}{v:.6g}" for k, v in rows)

