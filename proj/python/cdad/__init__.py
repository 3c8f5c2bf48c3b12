"""Python bindings for the cdad anomaly-detection core."""

from ._core import (
    CdadError,
    Model,
    ModelError,
    NoGuaranteeError,
    PreconditionError,
    Simulator,
)

__all__ = [
    "CdadError",
    "Model",
    "ModelError",
    "NoGuaranteeError",
    "PreconditionError",
    "Simulator",
]
