"""Spectral densities on a uniform frequency grid over [0, pi].

Convention: a density includes the ``1/(2 pi)`` factor, so the
autocovariance is ``gamma(h) = int_{-pi}^{pi} exp(i h lam) f(lam) dlam``
and ``int_0^pi f = gamma(0) / 2``. Cross-spectra follow
``gamma_XZ(h) = E[X_{t+h} Z_t]``. Integrals over the grid use the composite
trapezoid rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    InsufficientDataError,
    NonstationaryModelError,
    PerfectPredictionError,
    SeriesTooShortError,
    ZeroDenominatorError,
    ZeroMassError,
)
from .series import as_series, write_csv

DEFAULT_N = 2048


@dataclass(frozen=True)
class FrequencyGrid:
    """Points ``lam_j = pi * j / N`` for ``j = 0..N``."""

    N: int = DEFAULT_N

    def __post_init__(self):
        if int(self.N) < 1:
            raise ValueError("grid needs N >= 1")
        object.__setattr__(self, "N", int(self.N))

    @cached_property
    def points(self) -> np.ndarray:
        lam = np.pi * np.arange(self.N + 1) / self.N
        lam.setflags(write=False)
        return lam

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoid weights; ``weights @ y`` approximates ``int_0^pi y``."""
        w = np.full(self.N + 1, np.pi / self.N)
        w[0] *= 0.5
        w[-1] *= 0.5
        w.setflags(write=False)
        return w

    @property
    def step(self) -> float:
        return np.pi / self.N

    def integrate(self, y) -> float:
        return float(self.weights @ np.asarray(y))

    def cumulative(self, y) -> np.ndarray:
        """Running trapezoid integral from 0 to each grid point."""
        y = np.asarray(y, dtype=float)
        out = np.zeros(self.N + 1)
        out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1])) * self.step
        return out


@dataclass(frozen=True)
class SpectralDensity:
    grid: FrequencyGrid
    values: np.ndarray
    label: str = "f"

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.N + 1,):
            raise ValueError(f"expected {self.grid.N + 1} values, got {v.shape}")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("spectral density must be finite and non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def total(self) -> float:
        """``int_0^pi f``."""
        return self.grid.integrate(self.values)

    def normalized(self) -> np.ndarray:
        """Density rescaled to unit mass on [0, pi]."""
        tot = self.total
        if not tot > 0:
            raise ZeroMassError("spectral density has zero mass")
        return self.values / tot

    def acvf(self, max_lag: int) -> np.ndarray:
        return acvf_from_spectrum(self, max_lag)

    def to_csv(self, path) -> None:
        write_csv(path, {"lambda": self.grid.points, self.label: self.values})


@dataclass(frozen=True)
class SpectralMatrix:
    """2x2 cross-spectral matrix ``[[f_X, f_XZ], [f_ZX, f_Z]]`` per grid point."""

    grid: FrequencyGrid
    values: np.ndarray
    clipped: int = field(default=0, compare=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.N + 1, 2, 2):
            raise ValueError(f"expected shape ({self.grid.N + 1}, 2, 2), got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def fx(self) -> np.ndarray:
        return self.values[:, 0, 0].real

    @property
    def fz(self) -> np.ndarray:
        return self.values[:, 1, 1].real

    @property
    def fxz(self) -> np.ndarray:
        return self.values[:, 0, 1]

    def marginal_x(self) -> SpectralDensity:
        return SpectralDensity(self.grid, np.clip(self.fx, 0.0, None), "f_X")

    def marginal_z(self) -> SpectralDensity:
        return SpectralDensity(self.grid, np.clip(self.fz, 0.0, None), "f_Z")

    def min_eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.values)[:, 0]

    def to_csv(self, path) -> None:
        write_csv(path, {
            "lambda": self.grid.points,
            "f_X": self.fx,
            "f_Z": self.fz,
            "f_XZ_re": self.fxz.real,
            "f_XZ_im": self.fxz.imag,
        })


@dataclass(frozen=True)
class SpectralCDF:
    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


# --------------------------------------------------------------------------
# VAR models

@dataclass(frozen=True)
class VarModel:
    """Bivariate VAR(p): ``W_t = sum_k Phi_k W_{t-k} + e_t``, ``Var(e_t) = Sigma``."""

    coefs: np.ndarray  # shape (p, 2, 2)
    sigma: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefs, dtype=float)
        if c.ndim == 2:
            c = c[None]
        object.__setattr__(self, "coefs", c)
        object.__setattr__(self, "sigma", np.array(self.sigma, dtype=float))

    @property
    def order(self) -> int:
        return self.coefs.shape[0]

    def companion(self) -> np.ndarray:
        p, k = self.order, self.coefs.shape[1]
        C = np.zeros((k * p, k * p))
        C[:k, :] = np.hstack(list(self.coefs))
        if p > 1:
            C[k:, :-k] = np.eye(k * (p - 1))
        return C

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.companion()))))


def var_spectral_matrix(model: VarModel, grid: FrequencyGrid) -> SpectralMatrix:
    """``f(lam) = A(z)^{-1} Sigma A(z)^{-H} / (2 pi)`` with ``A(z) = I - sum Phi_k z^k``."""
    if model.spectral_radius() >= 1 - 1e-6:
        raise NonstationaryModelError(
            f"VAR spectral radius {model.spectral_radius():.6f} is not below 1")
    lam = grid.points
    k = model.coefs.shape[1]
    A = np.broadcast_to(np.eye(k, dtype=complex), (lam.size, k, k)).copy()
    for j, Phi in enumerate(model.coefs, start=1):
        A -= np.exp(-1j * j * lam)[:, None, None] * Phi
    Ainv = np.linalg.inv(A)
    f = Ainv @ model.sigma @ np.conj(np.swapaxes(Ainv, 1, 2)) / (2 * np.pi)
    # symmetrize away rounding
    f = 0.5 * (f + np.conj(np.swapaxes(f, 1, 2)))
    return SpectralMatrix(grid, f)


def _stack_pair(x, z) -> np.ndarray:
    x = as_series(x, "x").values
    z = as_series(z, "z").values
    if x.size != z.size:
        raise ValueError("series must have equal length")
    return np.column_stack([x, z])


def fit_var(x, z, p: int = 1) -> VarModel:
    """Per-equation least squares VAR(p) on demeaned data.

    ``Sigma`` is the residual covariance with divisor ``T - p``.
    """
    W = _stack_pair(x, z)
    T = W.shape[0]
    p = int(p)
    if p < 1:
        raise ValueError("VAR order must be >= 1")
    if T < 10 * p:
        raise InsufficientDataError(f"VAR({p}) needs T >= {10 * p}, got {T}")
    W = W - W.mean(axis=0)
    Y = W[p:]
    X = np.hstack([W[p - j:T - j] for j in range(1, p + 1)])
    B, *_ = np.linalg.lstsq(X, Y, rcond=None)
    resid = Y - X @ B
    sigma = resid.T @ resid / Y.shape[0]
    coefs = np.stack([B[2 * (j - 1):2 * j].T for j in range(1, p + 1)])
    model = VarModel(coefs, sigma)
    if model.spectral_radius() >= 1 - 1e-6:
        raise NonstationaryModelError(
            f"estimated VAR({p}) is not stationary (radius {model.spectral_radius():.6f})")
    return model


# --------------------------------------------------------------------------
# nonparametric estimation

def flat_top_taper(u) -> np.ndarray:
    """Trapezoidal flat-top lag window: 1 on |u| <= 1/2, linear to 0 at |u| = 1."""
    a = np.abs(np.asarray(u, dtype=float))
    return np.where(a <= 0.5, 1.0, np.where(a <= 1.0, 2.0 * (1.0 - a), 0.0))


def sample_cross_covariances(W: np.ndarray, max_lag: int) -> np.ndarray:
    """``G[h] = T^{-1} sum_t W_{t+h} W_t'`` for ``h = 0..max_lag``."""
    T = W.shape[0]
    G = np.empty((max_lag + 1, W.shape[1], W.shape[1]))
    for h in range(max_lag + 1):
        G[h] = W[h:].T @ W[:T - h] / T
    return G


def default_threshold(T: int) -> float:
    return max(1.0 / T, 2.0 * math.sqrt(math.log10(T) / T))


def flat_top_bandwidth(G: np.ndarray, C: float, run: int = 5) -> int:
    """Return ``2 q`` where q is the first lag after which ``run`` consecutive
    correlations (all entries, both directions) stay below ``C``."""
    d = np.sqrt(np.diag(G[0]))
    R = np.abs(G / np.outer(d, d))
    rmax = np.max(R, axis=(1, 2))
    L = rmax.size - 1
    for q in range(0, L - run + 1):
        if np.all(rmax[q + 1:q + run + 1] < C):
            return 2 * q
    return 2 * max(L - run, 0)


def flat_top_spectral_matrix(x, z, grid: FrequencyGrid, C: float | None = None,
                             bandwidth: int | None = None) -> SpectralMatrix:
    """Flat-top lag-window estimate of the 2x2 spectral matrix.

    The bandwidth is ``2 q`` from the empirical correlation rule with
    threshold ``C`` (default :func:`default_threshold`) unless given. Each
    2x2 matrix is made positive semidefinite by clipping negative
    eigenvalues; the number of repaired grid points is in ``clipped``.
    """
    W = _stack_pair(x, z)
    T = W.shape[0]
    if T < 8:
        raise SeriesTooShortError("flat-top estimation needs T >= 8")
    W = W - W.mean(axis=0)
    if np.any(np.var(W, axis=0) == 0):
        raise ZeroDenominatorError("constant input series")
    max_lag = min(T - 1, max(T // 2, 10))
    G = sample_cross_covariances(W, max_lag)
    if C is None:
        C = default_threshold(T)
    ell = flat_top_bandwidth(G, C) if bandwidth is None else int(bandwidth)
    ell = min(ell, max_lag)
    lam = grid.points
    f = np.broadcast_to(G[0].astype(complex), (lam.size, 2, 2)).copy()
    for h in range(1, ell + 1):
        w = float(flat_top_taper(h / ell))
        if w == 0.0:
            continue
        e = np.exp(-1j * h * lam)[:, None, None]
        f += w * (G[h] * e + G[h].T * np.conj(e))
    f /= 2 * np.pi
    f = 0.5 * (f + np.conj(np.swapaxes(f, 1, 2)))
    vals, vecs = np.linalg.eigh(f)
    neg = vals < 0
    clipped = int(np.any(neg, axis=1).sum())
    if clipped:
        vals = np.clip(vals, 0.0, None)
        f = vecs @ (vals[:, :, None] * np.conj(np.swapaxes(vecs, 1, 2)))
    return SpectralMatrix(grid, f, clipped=clipped)


# --------------------------------------------------------------------------
# derived quantities

def conditional_spectrum(F: SpectralMatrix) -> SpectralDensity:
    """Spectrum of the error of the best linear predictor of X from all of Z:
    ``f_X - |f_XZ|^2 / f_Z``, clipped to ``[0, f_X]``."""
    fx = np.clip(F.fx, 0.0, None)
    fz = F.fz
    mass_z = F.grid.integrate(np.clip(fz, 0.0, None))
    if not mass_z > 0:
        raise ZeroDenominatorError("attacker series has zero spectral mass")
    floor = 1e-10 * mass_z / np.pi
    denom = np.maximum(fz, floor)
    cond = fx - np.abs(F.fxz) ** 2 / denom
    cond = np.clip(cond, 0.0, fx)
    mass_x = F.grid.integrate(fx)
    if F.grid.integrate(cond) <= 1e-12 * mass_x:
        raise PerfectPredictionError(
            "residual spectrum has no mass: the attacker already predicts X perfectly")
    return SpectralDensity(F.grid, cond, "f_X|Z")


def spectral_cdf(f: SpectralDensity) -> SpectralCDF:
    """Normalized running integral ``F(lam) = int_0^lam f / int_0^pi f``."""
    tot = f.total
    if not tot > 0:
        raise ZeroMassError("cannot normalize a spectrum with zero mass")
    c = f.grid.cumulative(f.values) / tot
    c[-1] = 1.0
    return SpectralCDF(f.grid, np.clip(c, 0.0, 1.0))


def acvf_from_spectrum(f: SpectralDensity, max_lag: int) -> np.ndarray:
    """``gamma(h) = 2 int_0^pi cos(h lam) f(lam) dlam`` for ``h = 0..max_lag``."""
    lam = f.grid.points
    h = np.arange(max_lag + 1)
    wf = f.grid.weights * f.values
    out = np.empty(max_lag + 1)
    # chunk to bound memory for long series
    step = 256
    for s in range(0, h.size, step):
        out[s:s + step] = 2.0 * (np.cos(np.outer(h[s:s + step], lam)) @ wf)
    return out
