"""Long-range misanthrope processes, their hydrodynamic limits and numerical solvers."""

from ._hydroscale import (
    BudgetError,
    ConfigError,
    DomainError,
    EquilibriumTable,
    JumpKernel,
    RateModel,
    StabilityError,
    __version__,
    compare,
    coupling,
    equilibrium_csv,
    gamma_n,
    riemann_exclusion,
    solve,
)

__all__ = [
    "BudgetError",
    "ConfigError",
    "DomainError",
    "EquilibriumTable",
    "JumpKernel",
    "RateModel",
    "StabilityError",
    "__version__",
    "compare",
    "coupling",
    "equilibrium_csv",
    "gamma_n",
    "riemann_exclusion",
    "solve",
]
