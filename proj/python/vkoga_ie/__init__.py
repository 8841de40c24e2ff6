"""Greedy kernel surrogates as Newton initializers for implicit Euler."""

from ._core import (
    DataInconsistencyError,
    KernelExpansion,
    ModelFormatError,
    NearSingularPivotError,
    SurrogateModel,
    TrainResult,
    burgers_rhs,
    integrate_burgers,
    kernel_matrix,
    load_model,
    offline,
    select_epsilon,
    train,
)

__all__ = [
    "DataInconsistencyError",
    "KernelExpansion",
    "ModelFormatError",
    "NearSingularPivotError",
    "SurrogateModel",
    "TrainResult",
    "burgers_rhs",
    "integrate_burgers",
    "kernel_matrix",
    "load_model",
    "offline",
    "select_epsilon",
    "train",
]
