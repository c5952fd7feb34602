"""Per-variable impact moments for the coefficient view.

Families with scalar exogenous coefficients (MLR, ARIMAX) report the
mean and population standard deviation of coefficient * variable over
the fit range. VECM coefficients are vectors and LSTM parameters live
in gates, so those families report every variable as unavailable.
"""

from __future__ import annotations

import numpy as np

from ..timeseries import TimeSeriesFrame
from .arimax import FittedARIMAX
from .base import FittedModel, ImpactSummary, population_std
from .mlr import FittedMLR


def coefficient_impacts(model: FittedModel, frame: TimeSeriesFrame) -> list[ImpactSummary]:
    for name in model.spec.exogenous:
        frame.column(name)  # raises MissingVariable
    if isinstance(model, (FittedMLR, FittedARIMAX)):
        coefs = model.coefficients if isinstance(model, FittedMLR) else model.exog_coefficients
        lo = frame.index.index(model.fit_range[0])
        hi = frame.index.index(model.fit_range[1])
        summaries = []
        for name in model.spec.exogenous:
            col = frame.column(name)[lo : hi + 1]
            col = col[~np.isnan(col)]
            impact = coefs[name] * col
            summaries.append(ImpactSummary(
                variable=name,
                mean_impact=float(impact.mean()),
                std_impact=population_std(impact),
                available=True,
            ))
        summaries.sort(key=lambda s: -abs(s.mean_impact))
        return summaries
    return [ImpactSummary(variable=name, mean_impact=None, std_impact=None, available=False)
            for name in model.spec.exogenous]
