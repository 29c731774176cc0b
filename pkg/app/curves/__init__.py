from app.curves.learning_curve import (
    CurveParams,
    EnvelopePoint,
    FittedCurve,
    extrapolate_reward,
    fallback_curve,
    fit_arctan,
    monotone_envelope,
    predict,
)

__all__ = [
    "CurveParams",
    "EnvelopePoint",
    "FittedCurve",
    "extrapolate_reward",
    "fallback_curve",
    "fit_arctan",
    "monotone_envelope",
    "predict",
]
