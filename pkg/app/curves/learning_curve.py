"""
Learning-curve extraction, fitting and extrapolation.

The curve model is y(x) = a * arctan(b * (x + c)) + d with a, b >= 0, fitted
to the monotone envelope of an arm's observed scores by damped least squares.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from app.core.errors import CurveDomainError

logger = logging.getLogger(__name__)

N_PARAMS = 4
MAX_ITERATIONS = 200
# Levenberg-Marquardt counts every residual evaluation, including rejected steps
MAX_EVALUATIONS = MAX_ITERATIONS * (N_PARAMS + 1)
X_TOL = 1e-8
F_TOL = 1e-8

# (a, b) multipliers applied to the base start; the first entry is the base start itself
START_MULTIPLIERS: Tuple[Tuple[float, float], ...] = (
    (1.0, 1.0),
    (2.0, 0.5),
    (0.5, 2.0),
    (1.0, 10.0),
    (4.0, 0.1),
)


@dataclass(frozen=True)
class EnvelopePoint:
    """Best accuracy ``y`` reached after ``x`` seconds of arm time."""

    x: float
    y: float


@dataclass(frozen=True)
class CurveParams:
    a: float
    b: float
    c: float
    d: float

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class FittedCurve:
    """Result of fit_arctan.

    In fallback mode ``params`` is ignored and prediction returns ``level``.
    """

    params: CurveParams
    n_points: int
    residual: float
    fallback: bool = False
    level: float = 0.0

    @property
    def asymptote(self) -> float:
        if self.fallback:
            return _clamp(self.level)
        return _clamp(self.params.a * math.pi / 2.0 + self.params.d)

    def snapshot(self) -> dict:
        """Compact JSON-friendly view used in run logs."""
        return {
            "a": self.params.a,
            "b": self.params.b,
            "c": self.params.c,
            "d": self.params.d,
            "n_points": self.n_points,
            "residual": self.residual,
            "fallback": self.fallback,
            "level": self.level,
        }


_ZERO = CurveParams(0.0, 0.0, 0.0, 0.0)


def _clamp(value: float) -> float:
    return min(1.0, max(0.0, value))


def _coords(item) -> Tuple[float, float]:
    if isinstance(item, EnvelopePoint):
        return item.x, item.y
    return item.t, item.accuracy


def monotone_envelope(events: Iterable) -> List[EnvelopePoint]:
    """Keep the events whose accuracy strictly exceeds every earlier accuracy.

    Accepts TraceEvents or EnvelopePoints, so applying it twice is a no-op.
    """
    envelope: List[EnvelopePoint] = []
    best = -math.inf
    for item in events:
        x, y = _coords(item)
        if y > best:
            envelope.append(EnvelopePoint(x=x, y=y))
            best = y
    return envelope


def fallback_curve(envelope: Sequence[EnvelopePoint]) -> FittedCurve:
    """Constant extrapolation at the last envelope value (0 when empty)."""
    level = envelope[-1].y if envelope else 0.0
    if envelope:
        ys = np.array([p.y for p in envelope])
        residual = float(np.sqrt(np.mean((ys - level) ** 2)))
    else:
        residual = 0.0
    return FittedCurve(params=_ZERO, n_points=len(envelope), residual=residual, fallback=True, level=level)


def _residuals(theta: np.ndarray, u: np.ndarray, y: np.ndarray) -> np.ndarray:
    alpha, beta, c, d = theta
    return alpha * alpha * np.arctan(beta * beta * (u + c)) + d - y


def _jacobian(theta: np.ndarray, u: np.ndarray, y: np.ndarray) -> np.ndarray:
    alpha, beta, c, _ = theta
    shifted = u + c
    z = beta * beta * shifted
    slope = 1.0 / (1.0 + z * z)
    jac = np.empty((u.size, N_PARAMS))
    jac[:, 0] = 2.0 * alpha * np.arctan(z)
    jac[:, 1] = alpha * alpha * slope * 2.0 * beta * shifted
    jac[:, 2] = alpha * alpha * slope * beta * beta
    jac[:, 3] = 1.0
    return jac


def _starts(u: np.ndarray, y: np.ndarray) -> List[np.ndarray]:
    y_range = float(y.max() - y.min())
    x_span = float(u.max() - u.min()) or 1.0
    a0 = 2.0 * y_range / math.pi
    b0 = 1.0 / x_span
    c0 = -float(u[0])
    d0 = float(y.mean())
    return [
        np.array([math.sqrt(a0 * ma), math.sqrt(b0 * mb), c0, d0])
        for ma, mb in START_MULTIPLIERS
    ]


def fit_arctan(envelope: Sequence[EnvelopePoint]) -> FittedCurve:
    """Least-squares fit of the arctan model to a monotone envelope.

    Fewer than four points, or no start with a finite result, gives the
    constant fallback. A start that stops on the evaluation cap still competes
    on its cost.
    Non-finite coordinates raise CurveDomainError.
    """
    xs = np.array([p.x for p in envelope], dtype=float)
    ys = np.array([p.y for p in envelope], dtype=float)
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise CurveDomainError("envelope contains non-finite coordinates")
    if len(envelope) < N_PARAMS:
        return fallback_curve(envelope)

    # Work in normalized time so the solver sees O(1) parameters.
    scale = float(xs.max()) if xs.max() > 0 else 1.0
    u = xs / scale

    best: Optional[np.ndarray] = None
    best_cost = math.inf
    for theta0 in _starts(u, ys):
        try:
            result = least_squares(
                _residuals,
                theta0,
                jac=_jacobian,
                args=(u, ys),
                method="lm",
                xtol=X_TOL,
                ftol=F_TOL,
                max_nfev=MAX_EVALUATIONS,
            )
        except (ValueError, np.linalg.LinAlgError) as e:
            logger.debug(f"Fit start {theta0.tolist()} failed: {e}")
            continue
        if result.status < 0 or not np.all(np.isfinite(result.x)):
            continue
        if result.status == 0:
            # near-linear envelopes drift towards a -> inf, b -> 0 and stop on the
            # evaluation cap; the iterate is still a valid fit with a known cost
            logger.debug(f"Fit start {theta0.tolist()} stopped at {result.nfev} evaluations, cost {result.cost:.3g}")
        if result.cost < best_cost:
            best, best_cost = result.x, float(result.cost)

    if best is None:
        logger.warning(f"Arctan fit found no finite solution on {len(envelope)} points, using constant fallback")
        return fallback_curve(envelope)

    alpha, beta, c_u, d = (float(v) for v in best)
    params = CurveParams(a=alpha * alpha, b=beta * beta / scale, c=c_u * scale, d=d)
    predicted = params.a * np.arctan(params.b * (xs + params.c)) + params.d
    residual = float(np.sqrt(np.mean((predicted - ys) ** 2)))
    return FittedCurve(params=params, n_points=len(envelope), residual=residual)


def predict(curve: FittedCurve, x: float) -> float:
    """Evaluate the fitted curve at ``x`` seconds, clamped to [0, 1]."""
    if curve.fallback:
        return _clamp(curve.level)
    p = curve.params
    return _clamp(p.a * math.atan(p.b * (x + p.c)) + p.d)


def extrapolate_reward(curve: FittedCurve, t_x: float, b_rem: float) -> float:
    """Predicted accuracy if all remaining budget went to this arm."""
    return predict(curve, t_x + max(0.0, b_rem))
