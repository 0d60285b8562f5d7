"""Sampling and law verification for graphs built on exchangeable point
processes: graphon models, finite-size samplers, degree/sparsity statistics,
quadrature oracles, and a community-structured (sparse block-model) variant.
"""

from .graphon import (GraphonModel, Kind, Regime, TailProfile,
                      ValidationError, make_model)
from .kernels import BACKEND
from .localglobal import (LgSampledGraph, SparseSbmModel, block_link_matrix,
                          lg_asymptotic_nodes, lg_expected_nodes,
                          make_sbm_model, sample_lg_graph)
from .sampler import (LatentPoints, ResourceCapError, SampledGraph,
                      sample_graph, sample_graph_naive,
                      sample_graph_separable, sample_point_process,
                      truncation_level)
from .stats import (GraphStats, SweepResult, SweepRow, classify_regime,
                    degree_fraction, sigma_hat, summarize)
from .asymptotics import (OracleValues, asymptotic_degree_fraction,
                          asymptotic_node_count, assumption2_margin,
                          edges_from_nodes_prediction, expected_edges_exact,
                          expected_degree_count_exact, expected_nodes_exact,
                          nu, oracle_values, tauberian_defaults,
                          tauberian_ratio)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "GraphonModel", "GraphStats", "Kind", "LatentPoints",
    "LgSampledGraph", "OracleValues", "Regime", "ResourceCapError",
    "SampledGraph", "SparseSbmModel", "SweepResult", "SweepRow",
    "TailProfile", "ValidationError", "asymptotic_degree_fraction",
    "asymptotic_node_count", "assumption2_margin", "block_link_matrix",
    "classify_regime", "degree_fraction", "edges_from_nodes_prediction",
    "expected_degree_count_exact", "expected_edges_exact",
    "expected_nodes_exact", "lg_asymptotic_nodes", "lg_expected_nodes",
    "make_model", "make_sbm_model", "nu", "oracle_values", "sample_graph",
    "sample_graph_naive", "sample_graph_separable", "sample_lg_graph",
    "sample_point_process", "sigma_hat", "summarize", "tauberian_defaults",
    "tauberian_ratio", "truncation_level",
]
