"""Bivariate VAR(1) simulation and the Monte Carlo harness.

The VAR(1) design fixes the stationary covariance
``Gamma0 = v [[1, rho], [rho, 1]]`` with ``v = sigma2 / (1 - |rho|) + 1`` and
solves the Riccati equation ``Gamma0 = Phi Gamma0 Phi' + sigma2 I`` with
``Phi = (Gamma0 - Sigma)^{1/2} Gamma0^{-1/2}`` (symmetric square roots).
The smaller eigenvalue of ``Gamma0 - Sigma`` is then ``1 - |rho|``; with
``1 - rho`` in place of ``1 - |rho|`` it would turn negative for strongly
negative ``rho``.

Random streams: a ``numpy.random.SeedSequence`` built from the user seed is
spawned into one child per replicate, and each child is split again into a
simulation stream and a mechanism stream. Every stream is a PCG64
``Generator``; normals use numpy's ziggurat sampler. Replicate ``i`` therefore
draws the same numbers whatever the order of execution.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from ._json import dump_json
from .errors import FlipError, ReplicateError
from .pipeline import FlipConfig, flip_privatize
from .series import detrend_ols, write_csv

QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)
DEFAULT_TRENDS = ((30.0, 0.05), (10.0, 0.06))


def _sym_sqrt(A: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(A)
    if np.min(w) <= 0:
        raise FlipError(f"matrix not positive definite (min eigenvalue {np.min(w):.3g})")
    return (V * np.sqrt(w)) @ V.T


@dataclass(frozen=True)
class Var1Spec:
    rho: float
    sigma2: float
    v: float
    gamma0: np.ndarray
    phi: np.ndarray

    @property
    def sigma(self) -> np.ndarray:
        return self.sigma2 * np.eye(2)

    def riccati_residual(self) -> float:
        return float(np.max(np.abs(self.phi @ self.gamma0 @ self.phi.T + self.sigma - self.gamma0)))


def riccati_var1(rho: float, sigma2: float) -> Var1Spec:
    if not -0.99 <= rho <= 0.99:
        raise ValueError(f"rho must lie in [-0.99, 0.99], got {rho}")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    v = sigma2 / (1.0 - abs(rho)) + 1.0
    gamma0 = v * np.array([[1.0, rho], [rho, 1.0]])
    phi = _sym_sqrt(gamma0 - sigma2 * np.eye(2)) @ np.linalg.inv(_sym_sqrt(gamma0))
    spec = Var1Spec(float(rho), float(sigma2), v, gamma0, phi)
    res = spec.riccati_residual()
    if res > 1e-10:
        raise FlipError(f"Riccati residual {res:.3g} exceeds 1e-10")
    if np.max(np.abs(np.linalg.eigvals(phi))) >= 1:
        raise FlipError("Phi is not stable")
    return spec


def simulate_var1(spec: Var1Spec, T: int, rng, x0=None) -> tuple[np.ndarray, np.ndarray]:
    """Simulate ``T`` steps; returns ``(x, z)``.

    The state before ``t = 1`` is drawn from ``N(0, Gamma0)`` unless ``x0``
    is given, so the path is stationary from the start.
    """
    rng = np.random.default_rng(rng)
    if T < 1:
        raise ValueError("T must be >= 1")
    if x0 is None:
        state = np.linalg.cholesky(spec.gamma0) @ rng.standard_normal(2)
    else:
        state = np.asarray(x0, dtype=float)
    eps = np.sqrt(spec.sigma2) * rng.standard_normal((T, 2))
    out = np.empty((T, 2))
    for t in range(T):
        state = spec.phi @ state + eps[t]
        out[t] = state
    return out[:, 0], out[:, 1]


@dataclass(frozen=True)
class McConfig:
    reps: int = 100
    T: int = 200
    rho: float = 0.1
    sigma2: float = 0.5
    delta: float = 0.0
    K: int = 25
    M: int = 45
    H: int = 24
    N: int = 2048
    trend: tuple | None = None  # ((a_x, b_x), (a_z, b_z)) for a + b t
    d: int = 0
    estimator: str = "var:1"
    seed: int = 0

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.T < 50:
            raise ValueError("T must be >= 50")
        if not -0.99 <= self.rho <= 0.99:
            raise ValueError(f"rho must lie in [-0.99, 0.99], got {self.rho}")

    def flip_config(self) -> FlipConfig:
        return FlipConfig(delta=self.delta, d=self.d, K=self.K, M=self.M, N=self.N,
                          estimator=self.estimator, H=self.H)


@dataclass
class McResult:
    config: McConfig
    replicates: dict  # column name -> array, one entry per replicate
    summary: dict = field(default_factory=dict)

    def write(self, prefix) -> None:
        write_csv(f"{prefix}.replicates.csv", self.replicates)
        dump_json(f"{prefix}.summary.json", self.summary)


def _quantiles(a) -> dict:
    return {f"q{int(round(100 * q)):02d}": float(v) for q, v in zip(QUANTILES, np.quantile(a, QUANTILES))}


def run_replicate(config: McConfig, spec: Var1Spec, child: np.random.SeedSequence) -> dict:
    sim_ss, mech_ss = child.spawn(2)
    x, z = simulate_var1(spec, config.T, np.random.default_rng(sim_ss))
    if config.trend is not None:
        t = np.arange(1, config.T + 1)
        (ax, bx), (az, bz) = config.trend
        x = x + ax + bx * t
        z = z + az + bz * t
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = flip_privatize(x, z, config.flip_config(), np.random.default_rng(mech_ss))
    rep = res.report
    row = {"privacy": rep.lip, "privacy_truncated": rep.lip_truncated,
           "d_path": rep.d_path, "d_acf": rep.d_acf,
           "Delta": rep.Delta if rep.Delta is not None else 0.0}
    if config.trend is not None:
        orig = detrend_ols(x, config.d)
        priv = detrend_ols(res.privatized, config.d)
        gap = np.abs(priv.coefficients - orig.coefficients) / orig.stderr
        row["trend_max_se_gap"] = float(np.max(gap))
    return row


def run_monte_carlo(config: McConfig) -> McResult:
    """Simulate, privatize and score ``config.reps`` replicates.

    A failing replicate aborts the run with :class:`ReplicateError`.
    """
    spec = riccati_var1(config.rho, config.sigma2)
    children = np.random.SeedSequence(config.seed).spawn(config.reps)
    rows = []
    for i, child in enumerate(children):
        try:
            rows.append(run_replicate(config, spec, child))
        except FlipError as exc:
            raise ReplicateError(str(exc), i) from exc
    cols = {"replicate": np.arange(config.reps)}
    for k in rows[0]:
        cols[k] = np.array([r[k] for r in rows])
    dp, da = cols["d_path"], cols["d_acf"]
    summary = {
        "config": asdict(config),
        "var1": {"v": spec.v, "phi": spec.phi, "gamma0": spec.gamma0,
                 "riccati_residual": spec.riccati_residual()},
        "mean_privacy": float(np.mean(cols["privacy"])),
        "min_privacy": float(np.min(cols["privacy"])),
        "mean_privacy_truncated": float(np.mean(cols["privacy_truncated"])),
        "d_path": _quantiles(dp) | {"mean": float(np.mean(dp)),
                                    "frac_ge_1": float(np.mean(dp >= 1.0)),
                                    "frac_gt_0.64": float(np.mean(dp > 0.64))},
        "d_acf": _quantiles(da) | {"mean": float(np.mean(da))},
    }
    if "trend_max_se_gap" in cols:
        summary["trend_recovered_within_2se"] = float(np.mean(cols["trend_max_se_gap"] <= 2.0))
    return McResult(config, cols, summary)
