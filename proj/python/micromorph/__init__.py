"""Micromorphic elasticity checks: Euler-Lagrange residuals, configurational
balance laws and the J, L, M integrals."""

from ._core import (
    ConstitutiveError,
    DomainError,
    Error,
    NumericError,
    ParseError,
    Scenario,
    ShapeError,
    format_report,
    gauss_legendre,
    isotropic_basis,
    list_scenarios,
    run,
    scenario_source,
    set_threads,
)

__all__ = [
    "ConstitutiveError",
    "DomainError",
    "Error",
    "NumericError",
    "ParseError",
    "Scenario",
    "ShapeError",
    "format_report",
    "gauss_legendre",
    "isotropic_basis",
    "list_scenarios",
    "run",
    "scenario_source",
    "set_threads",
]
