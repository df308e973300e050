"""Movement laws and least-squares fits.

Three models of human motor performance drive the workbench:

* pointing: T = a + b·log2(A/W + 1), difficulty in bits;
* sub-movement (iterative-correction): T = a + b·n·(A/W)^(1/n);
* tunnel traversal: T = a + b·∫ ds/W(s) (difficulty from `paths`).

Fitting observed (difficulty, mean time) pairs by ordinary least squares
yields the coefficients and the index of performance ip = 1/b in
bits per second, the device-independent throughput used to compare
controllers. The alternative mean(ID/MT) throughput convention is not
implemented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, SingularDesignError


@dataclass(frozen=True)
class LawParams:
    """Model coefficients: intercept a (s), slope b (s per unit difficulty),
    and the sub-movement count n (sub-movement model only)."""

    a: float
    b: float
    n: int | None = None

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError(f"coefficients must be finite, got a={self.a}, b={self.b}")
        if self.n is not None:
            if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
                raise DomainError(f"n must be an integer >= 1, got {self.n!r}")


@dataclass(frozen=True)
class Observation:
    """One measured point: task difficulty (bits, A/W ratio, or tunnel
    integral) against mean movement time in seconds."""

    difficulty: float
    mean_time: float

    def __post_init__(self):
        if not (math.isfinite(self.difficulty) and self.difficulty >= 0):
            raise DomainError(f"difficulty must be finite and >= 0, got {self.difficulty}")
        if not (math.isfinite(self.mean_time) and self.mean_time > 0):
            raise DomainError(f"mean_time must be finite and > 0, got {self.mean_time}")


@dataclass(frozen=True)
class FitResult:
    params: LawParams
    r_squared: float
    n_points: int
    sse: float

    @property
    def ip(self) -> float | None:
        """Index of performance 1/b (bits/s); undefined when b <= 0."""
        return 1.0 / self.params.b if self.params.b > 0 else None


def fitts_id(amplitude: float, width: float) -> float:
    """Index of difficulty in bits for pointing over distance `amplitude`
    at a target of width `width` (same units)."""
    if not (math.isfinite(amplitude) and math.isfinite(width)):
        raise DomainError(f"amplitude and width must be finite, got A={amplitude}, W={width}")
    if width <= 0:
        raise DomainError(f"width must be > 0, got {width}")
    if amplitude < 0:
        raise DomainError(f"amplitude must be >= 0, got {amplitude}")
    return math.log2(amplitude / width + 1.0)


def linear_law_time(params: LawParams, difficulty: float) -> float:
    """Predicted time a + b·difficulty; serves both pointing (difficulty in
    bits) and tunnel traversal (difficulty = path integral)."""
    if not (math.isfinite(difficulty) and difficulty >= 0):
        raise DomainError(f"difficulty must be finite and >= 0, got {difficulty}")
    return params.a + params.b * difficulty


def meyer_time(params: LawParams, ratio: float) -> float:
    """Predicted time a + b·n·ratio^(1/n) for an aimed movement made of n
    sub-movements, ratio = A/W. Equals linear_law_time on the ratio when
    n = 1; approaches the logarithmic pointing law as n grows."""
    if params.n is None:
        raise DomainError("sub-movement count n is required")
    if not (math.isfinite(ratio) and ratio > 0):
        raise DomainError(f"ratio must be finite and > 0, got {ratio}")
    return params.a + params.b * params.n * ratio ** (1.0 / params.n)


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    """Simple OLS of y on x with intercept: (a, b, r_squared, sse)."""
    xm = float(x.mean())
    ym = float(y.mean())
    dx = x - xm
    sxx = float(np.dot(dx, dx))
    if sxx == 0.0:
        raise SingularDesignError("regressor is constant; need >= 2 distinct difficulty values")
    b = float(np.dot(dx, y - ym) / sxx)
    a = ym - b * xm
    resid = y - (a + b * x)
    sse = float(np.dot(resid, resid))
    sst = float(np.dot(y - ym, y - ym))
    r_squared = 1.0 if sst == 0.0 else min(1.0, max(0.0, 1.0 - sse / sst))
    return a, b, r_squared, sse


def _sorted_xy(observations: Iterable[Observation]) -> tuple[np.ndarray, np.ndarray]:
    # sorting makes fits bitwise permutation-invariant
    obs = sorted(observations, key=lambda o: (o.difficulty, o.mean_time))
    if len(obs) < 2:
        raise SingularDesignError(f"need at least 2 observations, got {len(obs)}")
    x = np.array([o.difficulty for o in obs], dtype=float)
    y = np.array([o.mean_time for o in obs], dtype=float)
    return x, y


def fit_linear_law(observations: Sequence[Observation]) -> FitResult:
    """OLS of mean time on difficulty. The slope's reciprocal is the index
    of performance; a non-positive slope still yields a result, with ip
    flagged undefined (None)."""
    x, y = _sorted_xy(observations)
    a, b, r_squared, sse = _ols(x, y)
    return FitResult(LawParams(a, b), r_squared, len(x), sse)


def fit_meyer(observations: Sequence[Observation], n_max: int = 10) -> FitResult:
    """Grid-search the sub-movement count: for each integer n in 1..n_max,
    regress mean time on n·ratio^(1/n) and keep the minimum-sse fit (ties
    to the smallest n). Observations carry difficulty = A/W ratio."""
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    ratio, y = _sorted_xy(observations)
    best: FitResult | None = None
    for n in range(1, n_max + 1):
        regressor = n * ratio ** (1.0 / n)
        a, b, r_squared, sse = _ols(regressor, y)
        if best is None or sse < best.sse:
            best = FitResult(LawParams(a, b, n), r_squared, len(y), sse)
    assert best is not None
    return best
