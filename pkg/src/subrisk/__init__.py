"""KL risk of multinomial MLEs with and without known group sums."""

from .asymptotics import (
    RiskExpansion,
    dimension_ratio,
    eval_risk,
    full_expansion,
    negativity_threshold,
    risk_difference,
    second_stage_A,
    submodel_expansion,
    submodel_expansion_full,
    two_stage_expansion,
)
from .montecarlo import (
    DiscardPolicy,
    Model,
    RiskEstimate,
    SimConfig,
    discard_probability_bound,
    exact_risk,
    simulate_paths,
    simulate_risk,
)
from .rss import RssQuery, RssResult, rss_approx, rss_sim
from .table import (
    Counts,
    ProbTable,
    chain_decompose,
    kl_divergence,
    mle_full,
    mle_submodel,
    validate_table,
)

__version__ = "0.1.0"
