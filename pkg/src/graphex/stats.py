"""Observable statistics of sampled graphs and regime classification."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .graphon import Regime
from .sampler import SampledGraph


class UndefinedEstimatorError(ValueError):
    """sigma_hat needs at least 2 nodes and 2 edges."""


class InsufficientDataError(ValueError):
    """Regime classification needs a wide-enough sweep."""


@dataclass(frozen=True)
class GraphStats:
    n_nodes: int
    n_edges: int            # self-loops counted once
    n_self_loops: int
    degree_hist: dict       # j -> count of nodes with degree j, j >= 1
    sigma_hat: Optional[float]

    def to_json_dict(self) -> dict:
        return {
            "n_nodes": self.n_nodes,
            "n_edges": self.n_edges,
            "n_self_loops": self.n_self_loops,
            "degree_hist": {str(j): c for j, c in
                            sorted(self.degree_hist.items())},
            "sigma_hat": self.sigma_hat,
        }


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    replicate: int
    seed: int
    n_latent: int
    n_nodes: int
    n_edges: int
    n_self_loops: int
    degree_counts: tuple    # counts for degrees 1..K
    sigma_hat: Optional[float]


@dataclass
class SweepResult:
    alphas: tuple
    replicates: int
    rows: list = field(default_factory=list)

    def rows_for_alpha(self, alpha: float) -> list:
        return [r for r in self.rows if r.alpha == alpha]

    def mean(self, alpha: float, attr: str) -> float:
        vals = [getattr(r, attr) for r in self.rows_for_alpha(alpha)]
        vals = [v for v in vals if v is not None]
        return float(np.mean(vals))

    def mean_degree_fraction(self, alpha: float, j: int) -> float:
        fracs = []
        for r in self.rows_for_alpha(alpha):
            if r.n_nodes > 0:
                c = r.degree_counts[j - 1] if j - 1 < len(r.degree_counts) else 0
                fracs.append(c / r.n_nodes)
        return float(np.mean(fracs)) if fracs else 0.0


def summarize(graph: SampledGraph) -> GraphStats:
    """Counts N, N^(e), self-loops and the degree histogram.

    A node's degree is its number of incident edges with a self-loop
    contributing one, so sum_i D_i = 2 N^(e) - L.
    """
    n = graph.n_nodes
    loops = graph.edge_i == graph.edge_j
    n_loops = int(loops.sum())
    deg = np.zeros(n, dtype=np.int64)
    if graph.n_edges:
        np.add.at(deg, graph.edge_i, 1)
        np.add.at(deg, graph.edge_j[~loops], 1)
    hist_vals, hist_counts = np.unique(deg, return_counts=True)
    hist = {int(j): int(c) for j, c in zip(hist_vals, hist_counts) if j >= 1}
    sh = None
    if n >= 2 and graph.n_edges >= 2:
        sh = 2.0 * math.log(n) / math.log(graph.n_edges) - 1.0
    return GraphStats(n, graph.n_edges, n_loops, hist, sh)


def sigma_hat(stats: GraphStats) -> float:
    """2 log N / log N^(e) - 1 (natural logs; base-invariant)."""
    if stats.n_nodes < 2 or stats.n_edges < 2:
        raise UndefinedEstimatorError(
            "sigma_hat needs n_nodes >= 2 and n_edges >= 2")
    return 2.0 * math.log(stats.n_nodes) / math.log(stats.n_edges) - 1.0


def degree_fraction(stats: GraphStats, j: int) -> float:
    """N_{alpha,j} / N_alpha (0 when no node has degree j)."""
    if stats.n_nodes < 1:
        raise UndefinedEstimatorError("degree_fraction needs n_nodes >= 1")
    if j < 1:
        raise ValueError("degree j must be >= 1")
    return stats.degree_hist.get(j, 0) / stats.n_nodes


def stats_row(graph: SampledGraph, alpha: float, replicate: int, seed: int,
              max_degree_col: int = 6) -> SweepRow:
    st = summarize(graph)
    degs = tuple(st.degree_hist.get(j, 0)
                 for j in range(1, max_degree_col + 1))
    return SweepRow(alpha, replicate, seed, graph.n_latent, st.n_nodes,
                    st.n_edges, st.n_self_loops, degs, st.sigma_hat)


def classify_regime(sweep: SweepResult, dense_floor: float = 1e-3,
                    deg1_threshold: float = 0.7):
    """Heuristic finite-size regime call from a sweep, with diagnostics.

    The regimes are asymptotic notions; these thresholds are calibrated to
    the desk-scale grids used in the verification suite and are reported
    alongside the trend series so callers can judge them.
    """
    alphas = sorted({r.alpha for r in sweep.rows})
    if len(alphas) < 4:
        raise InsufficientDataError("need >= 4 distinct alpha values")
    for al in alphas:
        if len(sweep.rows_for_alpha(al)) < 10:
            raise InsufficientDataError(
                f"need >= 10 replicates at alpha={al}")

    density = []      # mean N^(e) / N^2
    deg1 = []         # mean N_{alpha,1} / N
    sig = []          # mean sigma_hat
    for al in alphas:
        rows = [r for r in sweep.rows_for_alpha(al) if r.n_nodes >= 2]
        density.append(float(np.mean(
            [r.n_edges / r.n_nodes ** 2 for r in rows])))
        deg1.append(sweep.mean_degree_fraction(al, 1))
        sig.append(float(np.mean(
            [r.sigma_hat for r in rows if r.sigma_hat is not None])))

    diagnostics = {"alphas": alphas, "density": density,
                   "degree1_fraction": deg1, "sigma_hat": sig}
    if density[-1] >= dense_floor and density[-2] >= dense_floor:
        return Regime.Dense, diagnostics
    if deg1[-1] >= deg1_threshold and deg1[-1] >= deg1[0]:
        return Regime.AlmostExtremelySparse, diagnostics
    decreasing = all(a > b for a, b in zip(sig, sig[1:]))
    if decreasing and 0.05 < sig[-1] < 0.95 and deg1[-1] > 0.05:
        return Regime.SparsePowerLaw, diagnostics
    return Regime.AlmostDense, diagnostics


def write_stats_json(stats: GraphStats, path: str):
    with open(path, "w") as fh:
        json.dump(stats.to_json_dict(), fh, indent=2)


def read_stats_json(path: str) -> GraphStats:
    with open(path) as fh:
        d = json.load(fh)
    return GraphStats(d["n_nodes"], d["n_edges"], d["n_self_loops"],
                      {int(j): c for j, c in d["degree_hist"].items()},
                      d["sigma_hat"])
