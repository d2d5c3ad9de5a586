"""Series container, CSV input/output, standardization and polynomial trends."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    ConstantSeriesError,
    EmptySeriesError,
    ParseError,
    RankDeficiencyError,
    SeriesTooShortError,
)


@dataclass(frozen=True)
class TimeSeries:
    """Regularly sampled real-valued series.

    Values are stored as a read-only float array; ``label`` is free text
    carried into reports and CSV headers.
    """

    values: np.ndarray
    label: str = "x"

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size == 0:
            raise EmptySeriesError("series has no observations")
        if not np.all(np.isfinite(v)):
            raise ValueError("series contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    @property
    def T(self) -> int:
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def with_values(self, values, label=None) -> "TimeSeries":
        return TimeSeries(values, self.label if label is None else label)


def as_series(x, label="x") -> TimeSeries:
    if isinstance(x, TimeSeries):
        return x
    return TimeSeries(np.asarray(x, dtype=float), label)


# --------------------------------------------------------------------------
# CSV

def load_csv(path, column=None) -> TimeSeries:
    """Read one numeric column of a headed CSV file.

    Parameters
    ----------
    path : str or Path
        UTF-8, comma-separated file whose first row is a header.
    column : str, optional
        Header name of the value column. When omitted the file must have a
        single column, or the last column is used.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    ParseError
        On a missing column or a cell that is not a finite decimal number;
        ``row`` is the 1-based data row (the header is not counted).
    EmptySeriesError
        If the file has a header but no data rows.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptySeriesError(f"{path}: empty file") from None
        if column is None:
            idx = len(header) - 1
        elif column in header:
            idx = header.index(column)
        else:
            raise ParseError(f"column {column!r} not in header {header}")
        values = []
        for row, cells in enumerate(reader, start=1):
            if not cells or all(not c.strip() for c in cells):
                continue
            if idx >= len(cells) or not cells[idx].strip():
                raise ParseError("missing value", row=row)
            try:
                v = float(cells[idx])
            except ValueError:
                raise ParseError(f"cannot parse {cells[idx]!r} as a number", row=row) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite value {cells[idx]!r}", row=row)
            values.append(v)
    if not values:
        raise EmptySeriesError(f"{path}: no data rows")
    return TimeSeries(np.array(values), label=header[idx])


def write_csv(path, columns: dict) -> None:
    """Write equal-length columns to a headed CSV file (``repr`` floats)."""
    names = list(columns)
    cols = [np.asarray(columns[n]) for n in names]
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ValueError("columns must have equal length")
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for i in range(n):
            w.writerow([_fmt(c[i]) for c in cols])


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


# --------------------------------------------------------------------------
# standardization

@dataclass(frozen=True)
class Standardization:
    mean: float
    sd: float

    def __post_init__(self):
        if not self.sd > 0:
            raise ConstantSeriesError("standard deviation must be positive")

    def apply(self, values):
        return (np.asarray(values, dtype=float) - self.mean) / self.sd

    def invert(self, values):
        return np.asarray(values, dtype=float) * self.sd + self.mean


def standardize(x) -> tuple[TimeSeries, Standardization]:
    """Subtract the sample mean and divide by the sample sd (``ddof=1``)."""
    x = as_series(x)
    if x.T < 2:
        raise SeriesTooShortError("standardization needs at least two points")
    mean = float(np.mean(x.values))
    sd = float(np.std(x.values, ddof=1))
    if sd <= 1e-14 * max(1.0, abs(mean)):
        raise ConstantSeriesError("cannot standardize a constant series")
    st = Standardization(mean, sd)
    return x.with_values(st.apply(x.values)), st


def unstandardize(x, st: Standardization) -> TimeSeries:
    x = as_series(x)
    return x.with_values(st.invert(x.values))


# --------------------------------------------------------------------------
# polynomial trends

@dataclass(frozen=True)
class TrendFit:
    """OLS polynomial trend in the time index t = 1..T.

    ``coefficients[k]`` multiplies ``t**k``. The fit is also kept in the
    centered basis ``u = (t - center) / scale`` in which it was solved;
    evaluation goes through that basis.
    """

    order: int
    coefficients: np.ndarray
    stderr: np.ndarray
    residuals: TimeSeries
    fitted: TimeSeries
    center: float = field(repr=False, default=0.0)
    scale: float = field(repr=False, default=1.0)
    centered_coefficients: np.ndarray = field(repr=False, default=None)

    @property
    def T(self) -> int:
        return self.residuals.T

    def evaluate(self, t) -> np.ndarray:
        u = (np.asarray(t, dtype=float) - self.center) / self.scale
        # Horner in the centered basis
        out = np.zeros_like(u)
        for c in self.centered_coefficients[::-1]:
            out = out * u + c
        return out


def detrend_ols(x, d: int) -> TrendFit:
    """Regress ``x`` on ``1, t, ..., t**d`` with t = 1..T.

    The normal equations are solved on a centered and scaled Vandermonde
    matrix; coefficients are mapped back to powers of t afterwards, together
    with their OLS standard errors.
    """
    x = as_series(x)
    d = int(d)
    if d < 0:
        raise ValueError("trend order must be non-negative")
    T = x.T
    if T < d + 2:
        raise SeriesTooShortError(f"order-{d} trend needs T >= {d + 2}, got {T}")
    t = np.arange(1, T + 1, dtype=float)
    center = (T + 1) / 2.0
    scale = max((T - 1) / 2.0, 1.0)
    u = (t - center) / scale
    V = np.vander(u, d + 1, increasing=True)
    G = V.T @ V
    if np.linalg.cond(G) > 1e13:
        raise RankDeficiencyError(f"ill-conditioned trend design (order {d}, T={T})")
    cu = np.linalg.solve(G, V.T @ x.values)
    fitted = V @ cu
    resid = x.values - fitted
    dof = T - d - 1
    s2 = float(resid @ resid) / dof if dof > 0 else 0.0
    cov_u = s2 * np.linalg.inv(G)

    # p(t) = sum_k cu_k ((t - m)/s)^k  ->  sum_i ct_i t^i
    L = np.zeros((d + 1, d + 1))
    for k in range(d + 1):
        for i in range(k + 1):
            L[i, k] = math.comb(k, i) * (-center) ** (k - i) / scale**k
    ct = L @ cu
    cov_t = L @ cov_u @ L.T
    return TrendFit(
        order=d,
        coefficients=ct,
        stderr=np.sqrt(np.clip(np.diag(cov_t), 0.0, None)),
        residuals=x.with_values(resid),
        fitted=x.with_values(fitted),
        center=center,
        scale=scale,
        centered_coefficients=cu,
    )


def extrapolate_trend(fit: TrendFit, steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Trend values before and after the sample.

    Returns ``(prefix, suffix)``: the polynomial at t = -M+1, ..., 0 (in
    chronological order) and at t = T+1, ..., T+M.
    """
    M = int(steps)
    if M < 0:
        raise ValueError("steps must be non-negative")
    prefix = fit.evaluate(np.arange(-M + 1, 1))
    suffix = fit.evaluate(np.arange(fit.T + 1, fit.T + M + 1))
    return prefix, suffix
