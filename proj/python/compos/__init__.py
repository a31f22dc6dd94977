"""Quasi-likelihood logit regression and multivariate tools for compositional data."""

from ._compos import (
    CompositionError,
    centering_matrix,
    distances,
    fit,
    fit_logratio,
    logit_probabilities,
    multinomial_pinv,
    null_correlation,
    quasi_score,
    read_csv,
    simulate,
    stabilize,
    wedderburn_cov,
)

__all__ = [
    "CompositionError",
    "centering_matrix",
    "distances",
    "fit",
    "fit_logratio",
    "logit_probabilities",
    "multinomial_pinv",
    "null_correlation",
    "quasi_score",
    "read_csv",
    "simulate",
    "stabilize",
    "wedderburn_cov",
]
