"""Finite realizations of all-pass filters from their phase.

Cepstral convention: ``Psi(z) = exp(sum_k phi_k z^k)`` with an odd sequence
``phi_{-k} = -phi_k``, so on the unit circle ``z = exp(-i lam)``

    Psi(exp(-i lam)) = exp(-i * 2 sum_{k>=1} phi_k sin(k lam)).

The Laurent series factors as ``psi_plus(z) * psi_minus(1/z)`` with
``psi_plus = exp(phi_plus)`` and ``psi_minus = exp(-phi_plus)``; the one-sided
coefficients follow from the power-series recursion for the exponential.

A phase built from a spectral CDF runs from 0 to ``pi`` on [0, pi], so its
odd periodic extension jumps at ``pi`` and its sine coefficients decay only
like ``1/k``. :func:`design_filter` therefore removes the winding
``w * lam`` (``w = g(pi) / pi``) first, realizes the continuous remainder by
cepstral factorization, and puts the winding back as a pure ``w``-step
shift of the impulse response.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import LinAlgError, solve_toeplitz

from ._json import dump_json
from .errors import AliasingError, CoefficientOverflowError, LengthMismatchError, SeriesTooShortError
from .phase import PhaseFunction
from .series import TimeSeries, as_series
from .spectra import FrequencyGrid, SpectralDensity, acvf_from_spectrum

OVERFLOW_LIMIT = 1e12


@dataclass(frozen=True)
class CepstralCoeffs:
    """``phi_1..phi_K`` (index 0 of ``values`` is ``phi_1``)."""

    values: np.ndarray
    truncation_bound: float = float("nan")

    @property
    def K(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class AllPassFilter:
    """Two-sided impulse response ``psi_j`` for ``-M <= j <= M``.

    ``impulse[M + j]`` holds ``psi_j``. ``shift`` is the winding removed before
    factorization (the response is ``exp(i shift lam)`` times the cepstral
    factor).
    """

    cepstral: CepstralCoeffs
    psi_plus: np.ndarray
    psi_minus: np.ndarray
    impulse: np.ndarray
    M: int
    shift: int = 0
    unitarity_defect: float = float("nan")
    provenance: dict = field(default_factory=dict, compare=False)

    @property
    def lags(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    def response(self, lam) -> np.ndarray:
        """``Psi_M(exp(-i lam)) = sum_j psi_j exp(-i j lam)``."""
        lam = np.asarray(lam, dtype=float)
        return np.exp(-1j * np.multiply.outer(lam, self.lags)) @ self.impulse

    def cepstral_response(self, lam) -> np.ndarray:
        """Exact (untruncated in j) response of the K-term cepstral form."""
        lam = np.asarray(lam, dtype=float)
        k = np.arange(1, self.cepstral.K + 1)
        g = 2.0 * np.sin(np.multiply.outer(lam, k)) @ self.cepstral.values
        return np.exp(1j * (self.shift * lam - g))

    def to_dict(self) -> dict:
        return {
            "K": self.cepstral.K,
            "M": self.M,
            "shift": self.shift,
            "phi": self.cepstral.values.tolist(),
            "truncation_bound": self.cepstral.truncation_bound,
            "psi_plus": self.psi_plus.tolist(),
            "psi_minus": self.psi_minus.tolist(),
            "impulse": self.impulse.tolist(),
            "unitarity_defect": self.unitarity_defect,
            "provenance": self.provenance,
        }

    def to_json(self, path) -> None:
        dump_json(path, self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "AllPassFilter":
        return cls(
            cepstral=CepstralCoeffs(np.array(d["phi"], dtype=float), d["truncation_bound"]),
            psi_plus=np.array(d["psi_plus"], dtype=float),
            psi_minus=np.array(d["psi_minus"], dtype=float),
            impulse=np.array(d["impulse"], dtype=float),
            M=int(d["M"]),
            shift=int(d.get("shift", 0)),
            unitarity_defect=d["unitarity_defect"],
            provenance=d.get("provenance", {}),
        )

    @classmethod
    def from_json(cls, path) -> "AllPassFilter":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _phase_values(g):
    if isinstance(g, PhaseFunction):
        return g.grid, g.values
    raise TypeError("expected a PhaseFunction")


def cepstral_coeffs(g, K: int, grid: FrequencyGrid | None = None) -> CepstralCoeffs:
    """Sine coefficients ``phi_k = (1/pi) int_0^pi g(lam) sin(k lam) dlam``.

    ``g`` is a :class:`PhaseFunction` or an array on ``grid``. The integrals
    use Simpson's rule: the trapezoid error grows like ``k h^2`` for
    integrands that do not vanish at ``pi``, which is visible at ``k ~ K``. ``truncation_bound`` is
    ``<|g'|> / (2 pi K)``, with the derivative by finite differences and
    ``<.>`` the average over the circle.
    """
    if isinstance(g, PhaseFunction):
        grid, vals = g.grid, g.values
    else:
        if grid is None:
            raise ValueError("grid is required with a raw phase array")
        vals = np.asarray(g, dtype=float)
    K = int(K)
    if K < 1:
        raise ValueError("K must be >= 1")
    if K > grid.N // 4:
        raise AliasingError(f"K={K} exceeds N/4={grid.N // 4}")
    lam = grid.points
    k = np.arange(1, K + 1)
    phi = simpson(np.sin(np.outer(k, lam)) * vals, x=lam, axis=1) / np.pi
    dg = np.gradient(vals, lam)
    mean_abs = grid.integrate(np.abs(dg)) / np.pi
    bound = mean_abs / (2 * np.pi * K)
    return CepstralCoeffs(phi, float(bound))


def cepstral_recursions(cep: CepstralCoeffs, M: int) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients 0..M of ``exp(phi_plus(z))`` and ``exp(-phi_plus(z))``.

    ``(j+1) psi_{j+1} = +/- sum_{k=0}^{j} (k+1) phi_{k+1} psi_{j-k}`` with
    ``psi_0 = 1``; ``phi_k = 0`` beyond ``K``.
    """
    M = int(M)
    if M < 1:
        raise ValueError("M must be >= 1")
    kphi = np.zeros(M + 1)
    n = min(cep.K, M)
    # kphi[k] = (k+1) phi_{k+1}
    kphi[:n] = np.arange(1, n + 1) * cep.values[:n]
    plus = np.zeros(M + 1)
    minus = np.zeros(M + 1)
    plus[0] = minus[0] = 1.0
    for j in range(M):
        s = kphi[:j + 1] @ plus[j::-1]
        t = kphi[:j + 1] @ minus[j::-1]
        plus[j + 1] = s / (j + 1)
        minus[j + 1] = -t / (j + 1)
        if abs(plus[j + 1]) > OVERFLOW_LIMIT or abs(minus[j + 1]) > OVERFLOW_LIMIT:
            raise CoefficientOverflowError(
                f"cepstral recursion exceeded {OVERFLOW_LIMIT:g} at j={j + 1}")
    return plus, minus


def assemble_filter(psi_plus, psi_minus, M: int, shift: int = 0,
                    cepstral: CepstralCoeffs | None = None,
                    grid: FrequencyGrid | None = None) -> AllPassFilter:
    """Collect ``psi_j = sum_k psi_plus_{j+k} psi_minus_k`` for ``|j| <= M``.

    All supplied one-sided terms are used (at least ``M + 1 + |shift|``
    each). With ``shift = w`` the result is the impulse response of
    ``z^{-w} psi_plus(z) psi_minus(1/z)``. ``unitarity_defect`` is
    ``max | |Psi_M| - 1 |`` over ``grid`` (default N = 2048).
    """
    plus = np.asarray(psi_plus, dtype=float)
    minus = np.asarray(psi_minus, dtype=float)
    M = int(M)
    need = M + 1 + abs(shift)
    if plus.size < need or minus.size < need:
        raise ValueError(f"need at least {need} one-sided coefficients")
    # full[n] = psi_{n - (minus.size - 1)}
    full = np.convolve(plus, minus[::-1])
    offset = minus.size - 1
    j = np.arange(-M, M + 1) + shift
    impulse = np.zeros(2 * M + 1)
    ok = (j + offset >= 0) & (j + offset < full.size)
    impulse[ok] = full[j[ok] + offset]
    if cepstral is None:
        cepstral = CepstralCoeffs(np.zeros(0))
    filt = AllPassFilter(cepstral, plus, minus, impulse, M, shift)
    grid = grid or FrequencyGrid()
    defect = float(np.max(np.abs(np.abs(filt.response(grid.points)) - 1.0)))
    object.__setattr__(filt, "unitarity_defect", defect)
    return filt


def design_filter(g: PhaseFunction, K: int = 25, M: int = 45, unwrap: bool = True) -> AllPassFilter:
    """All-pass filter with response ``exp(i g(lam))`` truncated to ``|j| <= M``.

    With ``unwrap`` the integer winding ``w = round(g(pi)/pi)`` is taken out
    as a ``w``-step shift before the cepstral factorization; without it the
    sine series of ``g`` is truncated at ``K`` and factored directly.
    """
    grid, vals = _phase_values(g)
    lam = grid.points
    w = int(round(vals[-1] / np.pi)) if unwrap else 0
    # exp(i g) = exp(i w lam) exp(-i * sine-series of (w lam - g))
    cep = cepstral_coeffs(w * lam - vals, K, grid)
    plus, minus = cepstral_recursions(cep, M + abs(w))
    filt = assemble_filter(plus, minus, M, shift=w, cepstral=cep, grid=grid)
    object.__setattr__(filt, "provenance", dict(g.provenance))
    return filt


# --------------------------------------------------------------------------
# extension and application

@dataclass(frozen=True)
class Extension:
    values: np.ndarray  # length T + 2M: M backcasts, the data, M forecasts
    M: int
    ridge: float = 0.0


def _predictor_weights(gamma: np.ndarray, T: int, M: int):
    """Rows ``a_h`` with ``E[X_{T+h} | X_1..X_T] = a_h @ X[::-1]`` (h = 1..M)."""
    col = gamma[:T]
    rhs = np.column_stack([gamma[h:h + T] for h in range(1, M + 1)])
    ridge = 0.0
    try:
        A = solve_toeplitz(col, rhs, check_finite=False)
        if not np.all(np.isfinite(A)):
            raise LinAlgError("non-finite predictor")
    except LinAlgError:
        ridge = 1e-8 * gamma[0]
        col = col.copy()
        col[0] += ridge
        A = solve_toeplitz(col, rhs, check_finite=False)
    return A.T, ridge


def forecast_backcast_extend(x, f: SpectralDensity, M: int) -> Extension:
    """Pad ``x`` with ``M`` backcasts and ``M`` forecasts.

    Predictions are best linear predictors of the zero-mean stationary
    process with spectrum ``f``; the finite-sample normal equations are
    Toeplitz and solved with Levinson recursion over the last ``min(T, N/2)``
    observations (N is the grid size of ``f``). Backcasts use the
    time-reversed series (stationary autocovariances are symmetric). If the
    system is numerically singular a ridge ``1e-8 gamma(0)`` is added and
    reported on the result.
    """
    x = as_series(x)
    T = x.T
    M = int(M)
    if T < 4:
        raise SeriesTooShortError("extension needs T >= 4")
    if M == 0:
        return Extension(x.values.copy(), 0)
    # lags beyond about N alias on the frequency grid, so predict from at
    # most the N/2 observations nearest each end
    W = min(T, f.grid.N // 2)
    gamma = acvf_from_spectrum(f, W + M)
    A, ridge = _predictor_weights(gamma, W, M)
    v = x.values
    fwd = A @ v[::-1][:W]
    back = A @ v[:W]  # backcast X_{1-h} from the reversed series
    ext = np.concatenate([back[::-1], v, fwd])
    return Extension(ext, M, ridge)


def apply_filter(filt: AllPassFilter, x_ext, T: int | None = None, M: int | None = None) -> np.ndarray:
    """``Xhat_t = sum_{j=-M}^{M} psi_j X^E_{t-j}`` for ``t = 1..T``."""
    e = x_ext.values if isinstance(x_ext, Extension) else np.asarray(x_ext, dtype=float)
    M = filt.M if M is None else int(M)
    if M != filt.M:
        raise LengthMismatchError(f"filter has M={filt.M}, got M={M}")
    if T is None:
        T = e.size - 2 * M
    if e.size != T + 2 * M:
        raise LengthMismatchError(f"extended length {e.size} != T + 2M = {T + 2 * M}")
    return np.convolve(e, filt.impulse, mode="valid")


def filter_series(filt: AllPassFilter, x: TimeSeries, f: SpectralDensity) -> np.ndarray:
    ext = forecast_backcast_extend(x, f, filt.M)
    return apply_filter(filt, ext, x.T, filt.M)
