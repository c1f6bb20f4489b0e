"""Morse-Ingard thermoacoustic boundary integral solver."""

from ._core import (
    ArgumentError,
    DegenerateError,
    DomainError,
    GasParams,
    GeometryError,
    ModeConstants,
    bessel_jh,
    convergence_csv,
    default_config,
    derive_modes,
    helmholtz_kernel_2d,
    run_convergence,
    run_projection_sweep,
    run_spectrum,
    reference_params,
    transform_cond2,
)

__all__ = [
    "ArgumentError",
    "DegenerateError",
    "DomainError",
    "GasParams",
    "GeometryError",
    "ModeConstants",
    "bessel_jh",
    "convergence_csv",
    "default_config",
    "derive_modes",
    "helmholtz_kernel_2d",
    "run_convergence",
    "run_projection_sweep",
    "run_spectrum",
    "reference_params",
    "transform_cond2",
]
