"""Auxiliary coding scheme and key-generation protocol simulation."""

from .bounds import (BoundTerms, bernstein_bound, hoeffding_bound, lemma3_reliability_rhs,
                     lemma3_resolvability_rhs, oneshot_resolvability_bound,
                     reliability_terms, resolvability_terms, source_simulation_rhs)
from .codebook import CodebookPair, sample_codebooks
from .decode import DECODERS, AuxRound, aux_round
from .exact import (aux_error, aux_secrecy, covertness_kl, enumeration_budget, exact_metrics,
                    protocol_error, protocol_secrecy, source_identity, source_tv)
from .plan import RatePlan, UserSizes, fixed_plan, rate_plan
from .protocol import (ProtocolTrials, aux_monte_carlo, index_law_chisquare, protocol_metrics,
                       protocol_run)
from .report import SimReport, wilson_interval
from .study import DecayTable, decay_study, fit_log_slope

__all__ = [
    "AuxRound", "BoundTerms", "CodebookPair", "DECODERS", "DecayTable", "ProtocolTrials",
    "RatePlan", "SimReport", "UserSizes", "aux_error", "aux_monte_carlo", "aux_round",
    "aux_secrecy", "bernstein_bound", "covertness_kl", "decay_study", "enumeration_budget",
    "exact_metrics", "fit_log_slope", "fixed_plan", "hoeffding_bound", "index_law_chisquare",
    "lemma3_reliability_rhs", "lemma3_resolvability_rhs", "oneshot_resolvability_bound",
    "protocol_error", "protocol_metrics", "protocol_run", "protocol_secrecy", "rate_plan",
    "reliability_terms", "resolvability_terms", "sample_codebooks", "source_identity",
    "source_simulation_rhs", "source_tv", "wilson_interval",
]
