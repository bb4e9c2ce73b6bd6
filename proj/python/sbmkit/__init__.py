"""Stochastic block model sampling, belief propagation and spectral tools."""

from ._core import (
    Graph,
    InputError,
    IoError,
    ParameterError,
    TooLargeError,
    ValidationError,
    count_triangles,
    maximize_rate,
    min_bisection,
    nb_cluster,
    nb_spectrum,
    overlap,
    reconstruction_curve,
    run_bp,
    sample_er,
    sample_regular,
    sample_sbm,
    second_moment_exact,
)

__all__ = [
    "Graph",
    "InputError",
    "IoError",
    "ParameterError",
    "TooLargeError",
    "ValidationError",
    "count_triangles",
    "maximize_rate",
    "min_bisection",
    "nb_cluster",
    "nb_spectrum",
    "overlap",
    "reconstruction_curve",
    "run_bp",
    "sample_er",
    "sample_regular",
    "sample_sbm",
    "second_moment_exact",
]
