"""Python front end for the cvmet core library."""

from ._cvmet import (
    ContractViolation,
    CvmetError,
    EnvelopeViolation,
    InvalidDimension,
    NonConvergence,
    UnidentifiableParameter,
    UnsupportedConfiguration,
    ValidationError,
    __version__,
    default_config,
    expansion_terms,
    fit_scaling,
    homodyne_g_variance,
    precision_ratio,
    qfi,
    ratio_formula,
    run,
    strategy_state,
    verify_factorization,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
