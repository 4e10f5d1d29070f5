"""Polynomial-feature hinge-loss classifier trained by proximal ADMM."""

from ._core import (
    DataFormatError,
    DimensionMismatchError,
    EmptyDataError,
    FpcError,
    InvalidArgumentError,
    IoError,
    Model,
    ModelFormatError,
    NumericalError,
    bayes_h,
    evaluate,
    feature_dim,
    generate_test,
    generate_toy,
    hinge_scalar,
    hinge_vector,
    kernel_eval,
    max_degree,
    solve_admm,
    solve_dual_lp,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "DataFormatError",
    "DimensionMismatchError",
    "EmptyDataError",
    "FpcError",
    "InvalidArgumentError",
    "IoError",
    "Model",
    "ModelFormatError",
    "NumericalError",
    "bayes_h",
    "evaluate",
    "feature_dim",
    "generate_test",
    "generate_toy",
    "hinge_scalar",
    "hinge_vector",
    "kernel_eval",
    "max_degree",
    "solve_admm",
    "solve_dual_lp",
    "train",
]
