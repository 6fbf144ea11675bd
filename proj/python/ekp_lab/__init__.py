"""Python interface to the pseudo-spectral relaxation-limit laboratory."""

from ._core import (  # noqa: F401
    Params,
    chks_evolve,
    chks_free_energy,
    dealias,
    ekp_evolve,
    fit_rate,
    gradient,
    identity_residuals,
    integrate,
    laplacian,
    make_profile,
    relative_entropy,
    rhs_chks,
    run_sweep,
    solve_poisson,
    well_prepared_init,
)

__all__ = [
    "Params",
    "chks_evolve",
    "chks_free_energy",
    "dealias",
    "ekp_evolve",
    "fit_rate",
    "gradient",
    "identity_residuals",
    "integrate",
    "laplacian",
    "make_profile",
    "relative_entropy",
    "rhs_chks",
    "run_sweep",
    "solve_poisson",
    "well_prepared_init",
]
