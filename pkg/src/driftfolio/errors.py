"""Exception types shared across the package."""


class DriftfolioError(Exception):
    """Base class for all package errors."""


class DomainError(DriftfolioError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ModelValidationError(DriftfolioError, ValueError):
    """Market model coefficients violate a hard structural requirement."""


class RiccatiStepError(DriftfolioError, RuntimeError):
    """Covariance integration lost positive semidefiniteness (grid too coarse)."""


class CalibrationError(DriftfolioError, RuntimeError):
    """Multiplier calibration failed (no bracket, or non-integrable claim)."""


class SolverError(DriftfolioError, RuntimeError):
    """Value-function solver failure."""


class UnsupportedDimensionError(SolverError):
    """Finite differences only cover one risky asset; use the Monte Carlo solver."""


class CFLError(SolverError):
    """Grid/time-step combination violates the scheme's stability bound."""


class ConfigError(DriftfolioError, ValueError):
    """Experiment configuration file is unreadable or incomplete."""
