"""Blind graph matching from filtered graph signals."""

__version__ = "0.1.0"

from .errors import (BlindMatchError, ConfigError, DataError, FormatError,  # noqa: E402
                     InsufficientDataError, InvalidArgumentError, NumericDomainError)
from .graphs import (Graph, KnownVerdict, Permutation, WignerPairConfig, disagreement,  # noqa: E402
                     edge_sample, gen_ba, gen_er, gen_wigner_pair, is_identifiable_known, laplacian,
                     permute_graph)
from .signals import (CovarianceEstimate, GraphFilter, SignalBatch, SignalModel,  # noqa: E402
                      generate_signals, sample_covariance, true_covariance)
from .spectral import (BlindVerdict, EigenBasis, SelectedBasis, abs_basis, eig_sym,  # noqa: E402
                       identifiability_blind, select_k)
from .matching import (BlindParams, MatchReport, blind_match, blind_match_covariances,  # noqa: E402
                       fraction_correct, greedy_assign, hungarian, solve_assignment,
                       spectral_match_known)

__all__ = [
    "BlindMatchError", "ConfigError", "DataError", "FormatError", "InsufficientDataError",
    "InvalidArgumentError", "NumericDomainError",
    "Graph", "KnownVerdict", "Permutation", "WignerPairConfig", "disagreement", "edge_sample",
    "gen_ba", "gen_er", "gen_wigner_pair", "is_identifiable_known", "laplacian", "permute_graph",
    "CovarianceEstimate", "GraphFilter", "SignalBatch", "SignalModel", "generate_signals",
    "sample_covariance", "true_covariance",
    "BlindVerdict", "EigenBasis", "SelectedBasis", "abs_basis", "eig_sym", "identifiability_blind",
    "select_k",
    "BlindParams", "MatchReport", "blind_match", "blind_match_covariances", "fraction_correct",
    "greedy_assign", "hungarian", "solve_assignment", "spectral_match_known",
]
