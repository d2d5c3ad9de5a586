"""Randomized phase design for all-pass privacy filters.

A phase ``g(lam) = pi * R(H(lam))`` on [0, pi] (extended as an odd function)
is built from a spectral CDF ``H`` and an increasing map ``R`` of [0, 1]
onto itself with ``R(x) + R(1 - x) = 1``. When ``H`` is the CDF of the
residual spectrum ``f`` itself, ``int_0^pi cos(g) f = 0`` exactly; for a
budget ``delta > 0`` the CDF of the shifted density
``h = A (f_norm + Delta)`` is used instead, with ``Delta`` drawn from
``(0, B]``.

All spectral normalizations use unit mass on [0, pi]; see
:mod:`tsflip.spectra`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .betainc import beta_pdf, betainc
from .errors import DegenerateBudgetError, ShapeBelowOneError, WeightsNotNormalizedError
from .spectra import FrequencyGrid, SpectralCDF, SpectralDensity, spectral_cdf


@dataclass(frozen=True)
class RFunction:
    """Symmetrized mixture of Beta CDFs.

    ``R(x) = sum_j w_j / 2 * [I_x(a_j, b_j) + I_x(b_j, a_j)]``. Construct with
    :func:`beta_mixture_r`, which validates the components and computes the
    Lipschitz constant (the supremum of the mixture density).
    """

    components: tuple
    lipschitz: float
    zero_derivative_order: int

    def __call__(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        out = np.zeros_like(x)
        for w, a, b in self.components:
            out = out + 0.5 * w * (betainc(a, b, x) + betainc(b, a, x))
        return out

    def density(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for w, a, b in self.components:
            out = out + 0.5 * w * (beta_pdf(a, b, x) + beta_pdf(b, a, x))
        return out

    def to_dict(self) -> dict:
        return {
            "components": [{"weight": w, "a": a, "b": b} for w, a, b in self.components],
            "lipschitz": self.lipschitz,
            "zero_derivative_order": self.zero_derivative_order,
        }


def beta_mixture_r(components) -> RFunction:
    """Build an :class:`RFunction` from ``(weight, a, b)`` triples.

    Shapes must be at least 1 (otherwise the density is unbounded at an
    endpoint and R is not Lipschitz); weights must be positive and sum to 1.
    """
    comps = tuple((float(w), float(a), float(b)) for w, a, b in components)
    if not comps:
        raise ValueError("need at least one component")
    for w, a, b in comps:
        if a < 1 or b < 1:
            raise ShapeBelowOneError(f"shapes must be >= 1, got a={a}, b={b}")
        if not 0 < w <= 1:
            raise WeightsNotNormalizedError(f"weights must lie in (0, 1], got {w}")
    if abs(sum(w for w, _, _ in comps) - 1.0) > 1e-12:
        raise WeightsNotNormalizedError("weights must sum to 1")
    m = min(min(a, b) for _, a, b in comps)
    # density ~ x^(m-1) near 0, so R^(k)(0) = 0 at least for k <= floor(m - 1)
    order = int(math.floor(m - 1.0 + 1e-12))
    r = RFunction(comps, 1.0, order)
    object.__setattr__(r, "lipschitz", _sup_density(r))
    return r


def _sup_density(r: RFunction) -> float:
    xs = np.linspace(0.0, 1.0, 2001)
    ys = r.density(xs)
    best = float(ys.max())
    # refine every interior local maximum of the grid
    peaks = np.flatnonzero((ys[1:-1] > ys[:-2]) & (ys[1:-1] >= ys[2:])) + 1
    for i in peaks:
        lo, hi = xs[i - 1], xs[i + 1]
        res = minimize_scalar(lambda t: -float(r.density(t)), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return best


@dataclass(frozen=True)
class RConfig:
    """Ranges for randomized R draws.

    Component ``j`` gets ``a_j ~ U[d + 2 + j, d + 3 + j]`` and
    ``b_j = a_j + U[b_extra]``; weights are equal. ``a_j >= d + 2`` gives at
    least ``d`` vanishing derivatives of R at 0.
    """

    n_components: int = 2
    b_extra: tuple = (0.0, 3.0)
    components: tuple | None = None  # fixed (weight, a, b) triples override the draw


def draw_r(rng: np.random.Generator, d: int = 0, config: RConfig | None = None) -> RFunction:
    config = config or RConfig()
    if config.components is not None:
        return beta_mixture_r(config.components)
    J = config.n_components
    comps = []
    for j in range(J):
        a = rng.uniform(d + 2 + j, d + 3 + j)
        b = a + rng.uniform(*config.b_extra)
        comps.append((1.0 / J, a, b))
    # make the weights sum to exactly one after float rounding
    w_last = 1.0 - sum(c[0] for c in comps[:-1])
    comps[-1] = (w_last,) + comps[-1][1:]
    return beta_mixture_r(comps)


# --------------------------------------------------------------------------
# budget and shifted spectrum

@dataclass(frozen=True)
class DeltaBudget:
    delta: float
    B: float
    degenerate: bool
    flatness: float  # sup |pi * f_norm - 1|
    flatness_threshold: float  # sqrt(delta) / (L_R * pi)
    draw: float | None = None
    seed: int | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "B": self.B,
            "degenerate": self.degenerate,
            "flatness": self.flatness,
            "flatness_threshold": self.flatness_threshold,
            "Delta": self.draw,
            "seed": self.seed,
        }


def compute_B(f: SpectralDensity, delta: float, lipschitz: float) -> DeltaBudget:
    """Largest constant shift that keeps the mechanism delta-LIP.

    ``B = sqrt(delta) / (L_R pi^2 S - pi sqrt(delta))`` with
    ``S = sup |pi f_norm - 1|``. When ``S <= sqrt(delta) / (L_R pi)`` the
    spectrum is too flat for the constant-shift neighborhood and the budget is
    flagged degenerate (``B = nan``).
    """
    delta = float(delta)
    if not 0 <= delta < 1:
        raise ValueError("delta must satisfy 0 <= delta < 1")
    S = float(np.max(np.abs(np.pi * f.normalized() - 1.0)))
    rd = math.sqrt(delta)
    thresh = rd / (lipschitz * np.pi)
    if delta == 0:
        return DeltaBudget(0.0, 0.0, False, S, thresh)
    if S <= thresh:
        return DeltaBudget(delta, float("nan"), True, S, thresh)
    B = rd / (lipschitz * np.pi**2 * S - np.pi * rd)
    return DeltaBudget(delta, B, False, S, thresh)


def shift_spectrum(f: SpectralDensity, Delta: float) -> SpectralDensity:
    """``h = A (f_norm + Delta)`` with ``A = (int f) / (1 + pi Delta)``; same mass as f."""
    if Delta == 0:
        return f
    tot = f.total
    h = tot * (f.values / tot + Delta) / (1.0 + np.pi * Delta)
    return SpectralDensity(f.grid, h, "h")


def sample_h(f: SpectralDensity, budget: DeltaBudget, rng: np.random.Generator):
    """Draw ``Delta`` uniformly on ``(0, B]`` and return ``(h, budget)``.

    The returned budget records the draw. ``delta = 0`` gives ``h = f``.
    """
    if budget.degenerate:
        raise DegenerateBudgetError(
            f"spectrum too flat for a constant-shift mechanism: sup|pi f_norm - 1| = "
            f"{budget.flatness:.6g} <= {budget.flatness_threshold:.6g}")
    if budget.delta == 0:
        Delta = 0.0
    else:
        # 1 - U[0, 1) lies in (0, 1]
        Delta = budget.B * (1.0 - rng.random())
    return shift_spectrum(f, Delta), replace(budget, draw=Delta)


# --------------------------------------------------------------------------
# phase

@dataclass(frozen=True)
class PhaseFunction:
    """Phase ``g`` on the grid over [0, pi]; the filter response is ``exp(i g)``."""

    grid: FrequencyGrid
    values: np.ndarray
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def response(self) -> np.ndarray:
        return np.exp(1j * self.values)


def phase_function(R: RFunction, H: SpectralCDF, provenance: dict | None = None) -> PhaseFunction:
    """``g(lam) = pi R(H(lam))``; ``g(0) = 0`` and ``g(pi) = pi``."""
    g = np.pi * R(H.values)
    g[0] = 0.0
    g[-1] = np.pi * float(R(np.array(1.0)))
    return PhaseFunction(H.grid, g, dict(provenance or {}))


def design_phase(f: SpectralDensity, R: RFunction, delta: float, rng: np.random.Generator):
    """Budget, shifted spectrum and phase for residual spectrum ``f``.

    Returns ``(phase, h, budget)``; raises :class:`DegenerateBudgetError`
    when the budget cannot be met by a constant shift.
    """
    budget = compute_B(f, delta, R.lipschitz)
    h, budget = sample_h(f, budget, rng)
    H = spectral_cdf(h)
    prov = {"R": R.to_dict(), "budget": budget.to_dict()}
    return phase_function(R, H, prov), h, budget


def check_perfect_privacy(g: PhaseFunction, f: SpectralDensity) -> float:
    """``int_0^pi cos(g) f / int_0^pi f``; zero when g is built from f's own CDF."""
    return f.grid.integrate(np.cos(g.values) * f.values) / f.total
