"""Correlation games: 2x2 bimatrix games settled from measured correlations.

Payoffs are fixed functions of the correlations observed in an EPR-type
measurement protocol, so the same payoff relations reproduce the plain
bilinear game on classically anti-correlated pairs and acquire shifted,
split, or limit-only equilibria on entangled input.
"""

from .arbiter import (
    RunLog,
    SimulationResult,
    StrategyMix,
    UndefinedCorrelationError,
    estimate_correlations,
    infer_strategies,
    play_runs,
    settle,
)
from .corrmodel import (
    CorrelationModel,
    OutcomePair,
    axis_angle,
    classical_model,
    custom_model,
    hidden_variable_sample,
    kernel,
    mixture_model,
    sample_pair,
    singlet_model,
)
from .equilibrium import (
    Equilibrium,
    EquilibriumReport,
    Profile,
    best_response_oracle,
    classical_equilibria,
    quantum_equilibria,
    verify_equilibrium,
)
from .game import (
    Bimatrix2x2,
    GameSpec,
    OrderingViolation,
    SymmetricParams,
    classical_payoff,
    correlation_payoff,
    expected_payoff_classical,
    from_rstu,
    make_preset,
    quantum_payoff,
    quantum_payoff_angle,
)
from .gfn import (
    GFunction,
    NonInvertibleError,
    Segment,
    big_G,
    eval_g,
    make_catalog,
    preimage_g,
    q_preimage,
    q_transform,
    q_transform_angle,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # gfn
    "GFunction",
    "Segment",
    "NonInvertibleError",
    "make_catalog",
    "eval_g",
    "preimage_g",
    "big_G",
    "q_transform",
    "q_transform_angle",
    "q_preimage",
    # corrmodel
    "CorrelationModel",
    "OutcomePair",
    "classical_model",
    "singlet_model",
    "mixture_model",
    "custom_model",
    "kernel",
    "sample_pair",
    "hidden_variable_sample",
    "axis_angle",
    # game
    "Bimatrix2x2",
    "SymmetricParams",
    "GameSpec",
    "OrderingViolation",
    "from_rstu",
    "expected_payoff_classical",
    "correlation_payoff",
    "classical_payoff",
    "quantum_payoff",
    "quantum_payoff_angle",
    "make_preset",
    # equilibrium
    "Profile",
    "Equilibrium",
    "EquilibriumReport",
    "classical_equilibria",
    "quantum_equilibria",
    "verify_equilibrium",
    "best_response_oracle",
    # arbiter
    "StrategyMix",
    "RunLog",
    "SimulationResult",
    "UndefinedCorrelationError",
    "play_runs",
    "infer_strategies",
    "estimate_correlations",
    "settle",
]
