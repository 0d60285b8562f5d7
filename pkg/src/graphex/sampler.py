"""Finite-size graph samplers.

Three routes, all driven by the same latent Poisson process on
(0, alpha] x (0, v_max]:

* naive  — scans every unordered pair with the counter-based kernel; the
  reference implementation, feasible up to ~20k latent points.
* fast   — exact-in-distribution accelerated path.  Splits nodes into heavy
  (envelope weight > 0.5) and light; heavy-heavy pairs and all self-loops
  are drawn directly, while heavy-light and light-light pairs come from an
  aggregate Poisson proposal stream thinned with acceptance
  -log(1 - p) / (c g_i g_j), which makes the per-pair accepted-proposal
  count Poisson(-log(1-p)) and hence the edge indicator Bernoulli(p).
* hybrid — for models whose truncation level is astronomically large
  (sigma near 1): materializes the core (sociability <= u_star) exactly and
  attaches the deep tail as a Poisson stream of degree-1 nodes.  The only
  approximation is ignoring tail-node collisions, whose expected count is
  capped at TAIL_BIAS_BUDGET nodes by the choice of u_star.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from . import kernels, numerics
from .graphon import GraphonModel, Kind, ValidationError
from .numerics import integrate_semi_infinite, invert_monotone
from .rng import substream

DEFAULT_POINT_CAP = 100_000_000
# proposal inflation constants; see fast-path acceptance bound in the
# module docstring: -log(1-p)/p <= 1.151 for p <= 1/4, <= 1.387 for p <= 1/2
G_CUT = 0.5
C_LIGHT = 1.0 / (1.0 - G_CUT * G_CUT)  # 4/3
C_HEAVY_LIGHT = 1.5
# expected number of tail-node collisions tolerated by the hybrid path;
# collisions only merge degree-1 tail nodes, so this bounds the node-count
# bias and leaves edge counts untouched
TAIL_BIAS_BUDGET = 2.0
# auto method switches from naive to fast above this latent point count
NAIVE_POINT_LIMIT = 4000


class ResourceCapError(RuntimeError):
    """Latent point count exceeds the configured hard cap."""


def point_cap() -> int:
    value = os.environ.get("GRAPHEX_MAX_POINTS")
    return int(float(value)) if value else DEFAULT_POINT_CAP


@dataclass(frozen=True)
class LatentPoints:
    alpha: float
    v_max: float
    theta: np.ndarray
    vartheta: np.ndarray
    seed: int

    @property
    def count(self) -> int:
        return self.theta.shape[0]


@dataclass(frozen=True)
class SampledGraph:
    alpha: float
    seed: int
    truncation_delta: float
    v_max: float
    n_latent: int
    node_theta: np.ndarray     # retained nodes, degree >= 1
    node_vartheta: np.ndarray
    edge_i: np.ndarray         # int64, i <= j, lexicographically sorted
    edge_j: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.node_theta.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edge_i.shape[0]


def truncation_level(model: GraphonModel, alpha: float, delta: float) -> float:
    """Sociability cutoff v_max with bounded relative edge loss.

    Expected edges incident to latent points beyond v_max are at most
    alpha^2 int_{v_max}^inf mu, which is kept <= delta * (alpha^2 W-bar / 2),
    i.e. a delta fraction of the expected edge count.  Models with compact
    support return the support bound.  May return inf when the tail is so
    heavy the cutoff overflows float range (hybrid sampling handles that).
    """
    if not 0.0 < delta < 1.0:
        raise ValidationError(f"delta must be in (0,1), got {delta}")
    if model.kind is Kind.DenseCompact:
        return 1.0
    target = delta * model.total_mass() / 2.0
    if model.kind is Kind.Exponential:
        return math.log(2.0 / delta)
    if model.kind in (Kind.SeparablePower, Kind.NonSeparablePower):
        s = model.sigma
        lead = (s / (1.0 - s)) ** 2 if model.kind is Kind.SeparablePower \
            else s * s / (1.0 - s)
        return (target / lead) ** (-s / (1.0 - s)) - 1.0
    if model.kind is Kind.ExtremeSparse:
        log_arg = 1.0 / target - 1.0  # tail integral is 1/(1+log(1+v))
        if log_arg > 700.0:
            return math.inf
        return math.expm1(log_arg)
    # generic route (GGP, others): bracket then bisect the tail integral
    hi = 1.0
    while model.tail_mu_integral(hi) > target:
        hi *= 2.0
        if hi > 1e300:
            return math.inf
    return invert_monotone(lambda v: model.tail_mu_integral(v), target, hi)


def sample_point_process(alpha: float, v_max: float, seed: int) -> LatentPoints:
    """Unit-rate Poisson points on (0, alpha] x (0, v_max]."""
    if not (alpha > 0 and v_max > 0):
        raise ValidationError("alpha and v_max must be positive")
    mean = alpha * v_max
    cap = point_cap()
    if not math.isfinite(mean) or mean > 10.0 * cap:
        raise ResourceCapError(
            f"expected latent point count {mean} exceeds cap {cap}")
    rng = substream(seed, 0)
    k = int(rng.poisson(mean))
    if k > cap:
        raise ResourceCapError(f"latent point count {k} exceeds cap {cap}")
    theta = rng.uniform(0.0, alpha, size=k)
    vartheta = rng.uniform(0.0, v_max, size=k)
    return LatentPoints(alpha, v_max, theta, vartheta, seed)


def _retain(alpha, seed, delta, v_max, n_latent, theta, vartheta, ei, ej):
    """Prune degree-0 points and relabel edges to retained-node ids."""
    if ei.shape[0]:
        used = np.unique(np.concatenate([ei, ej]))
    else:
        used = np.empty(0, dtype=np.int64)
    remap = np.full(theta.shape[0], -1, dtype=np.int64)
    remap[used] = np.arange(used.shape[0])
    ri, rj = remap[ei], remap[ej]
    order = np.lexsort((rj, ri))
    return SampledGraph(alpha, seed, delta, v_max, n_latent,
                        theta[used], vartheta[used],
                        ri[order], rj[order])


def sample_graph_naive(model: GraphonModel, alpha: float, seed: int,
                       delta: float = 1e-3) -> SampledGraph:
    """Reference all-pairs sampler; edge draws are order-independent."""
    v_max = truncation_level(model, alpha, delta)
    if not math.isfinite(v_max):
        raise ResourceCapError(
            f"{model.kind.value}: truncation level is not finite; "
            "use the fast/hybrid sampler")
    pts = sample_point_process(alpha, v_max, seed)
    form, expo, transform = model.kernel_spec()
    a = np.asarray(transform(pts.vartheta), dtype=np.float64)
    ei, ej = kernels.find_edges(seed, a, form, expo)
    return _retain(alpha, seed, delta, v_max, pts.count,
                   pts.theta, pts.vartheta, ei, ej)


# ---------------------------------------------------------------------------
# fast path
# ---------------------------------------------------------------------------

def _envelope_weights(model: GraphonModel, vartheta: np.ndarray) -> np.ndarray:
    """g-hat with W(x,y) <= g-hat(x) g-hat(y) and, for non-separable kinds,
    -log(1 - W) <= c g-hat g-hat on the pair classes where it is used."""
    if model.is_separable():
        return model.separable_g_vec(vartheta)
    if model.kind is Kind.NonSeparablePower:
        return model.envelope_g_vec(vartheta)
    if model.kind is Kind.GGP:
        # ghat_i ghat_j = 2 r_i r_j = -log(1 - W) exactly
        return math.sqrt(2.0) * model.rho_bar_inv_vec(vartheta)
    raise ValidationError(
        f"fast sampling not supported for kind {model.kind.value}")


def _pair_prob(a: np.ndarray, form: int, expo: float,
               i: np.ndarray, j: np.ndarray,
               block_b=None, labels=None) -> np.ndarray:
    if form == 0:
        return a[i] * a[j]
    if form == 1:
        return np.power(a[i] + a[j] + 1.0, expo)
    if form == 2:
        return -np.expm1(-2.0 * a[i] * a[j])
    if form == 3:
        return block_b[labels[i], labels[j]] * a[i] * a[j]
    raise ValidationError("unsupported kernel form for fast path")


def _pair_neglog(a: np.ndarray, form: int, expo: float,
                 i: np.ndarray, j: np.ndarray,
                 block_b=None, labels=None) -> np.ndarray:
    """-log(1 - W) for index pairs, computed stably."""
    if form == 2:
        return 2.0 * a[i] * a[j]
    return -np.log1p(-_pair_prob(a, form, expo, i, j, block_b, labels))


def _weighted_choice(rng, weights: np.ndarray, cumsum: np.ndarray,
                     size: int) -> np.ndarray:
    u = rng.uniform(0.0, cumsum[-1], size=size)
    return np.searchsorted(cumsum, u, side="left")


def _fast_edges_arrays(a: np.ndarray, ghat: np.ndarray, form: int,
                       expo: float, rng, block_b=None, labels=None) -> tuple:
    """Edge list over materialized latent points, exact in distribution.

    `a` feeds the exact link probability, `ghat` is the thinning envelope
    with W <= ghat_i ghat_j and -log(1-W) <= c ghat_i ghat_j on the pair
    classes handled by proposals (light-light, heavy-light).
    """
    n = a.shape[0]
    out_i, out_j = [], []

    heavy = np.nonzero(ghat > G_CUT)[0]
    light = np.nonzero(ghat <= G_CUT)[0]

    # self-loops, all nodes, direct
    if form == 0:
        p_diag = a * a
    elif form == 1:
        p_diag = np.power(2.0 * a + 1.0, expo)
    elif form == 2:
        p_diag = -np.expm1(-(a * a))
    else:
        p_diag = block_b[labels, labels] * a * a
    cand = np.nonzero(p_diag > 0.0)[0]
    if cand.shape[0]:
        u = rng.uniform(size=cand.shape[0])
        hit = cand[u <= p_diag[cand]]
        out_i.append(hit)
        out_j.append(hit)

    # heavy x heavy, direct
    h = heavy.shape[0]
    if h > 1:
        ii, jj = np.triu_indices(h, k=1)
        gi, gj = heavy[ii], heavy[jj]
        p = _pair_prob(a, form, expo, gi, gj, block_b, labels)
        u = rng.uniform(size=p.shape[0])
        keep = u <= p
        out_i.append(gi[keep])
        out_j.append(gj[keep])

    g_light = ghat[light]
    g_heavy = ghat[heavy]
    sum_l = float(g_light.sum()) if light.shape[0] else 0.0
    sum_h = float(g_heavy.sum()) if heavy.shape[0] else 0.0

    # light x light via thinned aggregate proposals
    if light.shape[0] > 1 and sum_l > 0.0:
        cum_l = np.cumsum(g_light)
        t = int(rng.poisson(C_LIGHT * sum_l * sum_l / 2.0))
        if t:
            pi = light[_weighted_choice(rng, g_light, cum_l, t)]
            pj = light[_weighted_choice(rng, g_light, cum_l, t)]
            ok = pi != pj
            pi, pj = pi[ok], pj[ok]
            accept = (_pair_neglog(a, form, expo, pi, pj, block_b, labels)
                      / (C_LIGHT * ghat[pi] * ghat[pj]))
            u = rng.uniform(size=pi.shape[0])
            keep = u <= accept
            out_i.append(np.minimum(pi[keep], pj[keep]))
            out_j.append(np.maximum(pi[keep], pj[keep]))

    # heavy x light via thinned aggregate proposals
    if heavy.shape[0] and light.shape[0] and sum_h > 0.0 and sum_l > 0.0:
        cum_h = np.cumsum(g_heavy)
        cum_l = np.cumsum(g_light)
        t = int(rng.poisson(C_HEAVY_LIGHT * sum_h * sum_l))
        if t:
            pi = heavy[_weighted_choice(rng, g_heavy, cum_h, t)]
            pj = light[_weighted_choice(rng, g_light, cum_l, t)]
            accept = (_pair_neglog(a, form, expo, pi, pj, block_b, labels)
                      / (C_HEAVY_LIGHT * ghat[pi] * ghat[pj]))
            u = rng.uniform(size=pi.shape[0])
            keep = u <= accept
            out_i.append(np.minimum(pi[keep], pj[keep]))
            out_j.append(np.maximum(pi[keep], pj[keep]))

    if not out_i:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy()
    ei = np.concatenate(out_i).astype(np.int64)
    ej = np.concatenate(out_j).astype(np.int64)
    # proposals can hit the same pair more than once: deduplicate
    key = ei * np.int64(n) + ej
    _, idx = np.unique(key, return_index=True)
    return ei[idx], ej[idx]


def _fast_edges(model: GraphonModel, vartheta: np.ndarray, rng) -> tuple:
    form, expo, transform = model.kernel_spec()
    a = np.asarray(transform(vartheta), dtype=np.float64)
    ghat = _envelope_weights(model, vartheta)
    return _fast_edges_arrays(a, ghat, form, expo, rng)


def sample_graph_separable(model: GraphonModel, alpha: float, seed: int,
                           delta: float = 1e-3) -> SampledGraph:
    """Accelerated sampler for separable W(x,y) = g(x) g(y), g <= 1.

    Exact in distribution whenever the truncated point set is materializable;
    falls back to the hybrid deep-tail construction when the truncation level
    overflows (ExtremeSparse), which carries a bounded, documented bias.
    """
    if not model.is_separable():
        raise ValidationError(
            f"sample_graph_separable requires a separable kind, "
            f"got {model.kind.value}")
    return _sample_fast_or_hybrid(model, alpha, seed, delta)


def _sample_fast_or_hybrid(model: GraphonModel, alpha: float, seed: int,
                           delta: float) -> SampledGraph:
    v_max = truncation_level(model, alpha, delta)
    if math.isfinite(v_max) and alpha * v_max <= point_cap():
        pts = sample_point_process(alpha, v_max, seed)
        rng = substream(seed, 1)
        ei, ej = _fast_edges(model, pts.vartheta, rng)
        return _retain(alpha, seed, delta, v_max, pts.count,
                       pts.theta, pts.vartheta, ei, ej)
    return _sample_hybrid(model, alpha, seed, delta, v_max)


# ---------------------------------------------------------------------------
# hybrid deep-tail path
# ---------------------------------------------------------------------------

def _tail_g_integral(model: GraphonModel, v: float) -> float:
    """int_v^inf g for separable models (g = mu / W-bar-normalization)."""
    # for the registered separable kinds mu = c_mu * g with
    # c_mu = int g = mu(0) / g(0); here g(0) = 1 for all of them
    c_mu = model.mean_degree(0.0)
    return model.tail_mu_integral(v) / c_mu


def _tail_quantile(model: GraphonModel, v_star: float,
                   q: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling of the g-density restricted to (v_star, inf)."""
    if model.kind is Kind.ExtremeSparse:
        # tail mass beyond y is 1/(1 + log(1+y))
        l_star = 1.0 + math.log1p(v_star)
        with np.errstate(over="ignore"):
            return np.expm1(l_star / (1.0 - q))  # may overflow to inf: a
            # sociability so deep in the tail that g is numerically zero
    if model.kind is Kind.SeparablePower:
        s = model.sigma
        return (1.0 + v_star) * np.power(1.0 - q, -s / (1.0 - s)) - 1.0
    if model.kind is Kind.Exponential:
        return v_star - np.log1p(-q)
    raise ValidationError(
        f"hybrid tail sampling not supported for {model.kind.value}")


def _hybrid_core_level(model: GraphonModel, alpha: float) -> float:
    """Core cutoff u_star keeping expected tail collisions under budget."""
    target = TAIL_BIAS_BUDGET / (alpha ** 3 / 2.0)

    def tail_mu_sq(v: float) -> float:
        return integrate_semi_infinite(
            lambda x: model.mean_degree(x) ** 2, v)

    if tail_mu_sq(0.0) <= target:
        # the whole line already fits the collision budget (small alpha):
        # any cutoff works, so keep a unit core
        return 1.0
    hi = 1.0
    while tail_mu_sq(hi) > target:
        hi *= 2.0
        if hi * alpha > point_cap():
            raise ResourceCapError(
                "hybrid core would exceed the latent point cap")
    return invert_monotone(tail_mu_sq, target, hi)


def _sample_hybrid(model: GraphonModel, alpha: float, seed: int,
                   delta: float, v_max: float) -> SampledGraph:
    if not model.is_separable():
        raise ValidationError("hybrid path requires a separable model")
    u_star = _hybrid_core_level(model, alpha)
    pts = sample_point_process(alpha, u_star, seed)
    rng = substream(seed, 1)
    ei, ej = _fast_edges(model, pts.vartheta, rng)

    trng = substream(seed, 2)
    g_core = model.separable_g_vec(pts.vartheta)
    g_tail = _tail_g_integral(model, u_star)
    theta_parts = [pts.theta]
    var_parts = [pts.vartheta]
    edge_i_parts = [ei]
    edge_j_parts = [ej]
    next_id = pts.count

    # core-tail: Poisson stream of fresh degree-1 tail nodes attached to a
    # core endpoint chosen proportionally to its g weight
    sum_core = float(g_core.sum())
    n_ct = int(trng.poisson(alpha * g_tail * sum_core)) if sum_core > 0 else 0
    if n_ct:
        cum = np.cumsum(g_core)
        core_end = _weighted_choice(trng, g_core, cum, n_ct)
        tail_v = _tail_quantile(model, u_star, trng.uniform(size=n_ct))
        tail_ids = np.arange(next_id, next_id + n_ct, dtype=np.int64)
        next_id += n_ct
        theta_parts.append(trng.uniform(0.0, alpha, size=n_ct))
        var_parts.append(tail_v)
        edge_i_parts.append(np.minimum(core_end, tail_ids))
        edge_j_parts.append(np.maximum(core_end, tail_ids))

    # tail-tail: Poisson pairs of fresh tail nodes joined by one edge
    n_tt = int(trng.poisson(alpha * alpha * g_tail * g_tail / 2.0))
    if n_tt:
        va = _tail_quantile(model, u_star, trng.uniform(size=n_tt))
        vb = _tail_quantile(model, u_star, trng.uniform(size=n_tt))
        ids_a = np.arange(next_id, next_id + n_tt, dtype=np.int64)
        ids_b = ids_a + n_tt
        next_id += 2 * n_tt
        theta_parts.append(trng.uniform(0.0, alpha, size=n_tt))
        theta_parts.append(trng.uniform(0.0, alpha, size=n_tt))
        var_parts.append(va)
        var_parts.append(vb)
        edge_i_parts.append(ids_a)
        edge_j_parts.append(ids_b)

    theta = np.concatenate(theta_parts)
    vartheta = np.concatenate(var_parts)
    all_i = np.concatenate(edge_i_parts).astype(np.int64)
    all_j = np.concatenate(edge_j_parts).astype(np.int64)
    return _retain(alpha, seed, delta, v_max, int(next_id),
                   theta, vartheta, all_i, all_j)


def sample_graph(model: GraphonModel, alpha: float, seed: int,
                 delta: float = 1e-3, method: str = "auto") -> SampledGraph:
    """Front door: naive, fast, or automatic method selection."""
    if method == "naive":
        return sample_graph_naive(model, alpha, seed, delta)
    if method == "fast":
        return _sample_fast_or_hybrid(model, alpha, seed, delta)
    if method != "auto":
        raise ValidationError(f"unknown sampling method {method!r}")
    v_max = truncation_level(model, alpha, delta)
    if math.isfinite(v_max) and alpha * v_max <= NAIVE_POINT_LIMIT:
        return sample_graph_naive(model, alpha, seed, delta)
    return _sample_fast_or_hybrid(model, alpha, seed, delta)


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def write_graph_csv(graph: SampledGraph, node_path: str, edge_path: str):
    with open(node_path, "w") as fh:
        fh.write("id,theta,vartheta\n")
        for k in range(graph.n_nodes):
            # repr of the Python float round-trips exactly
            fh.write(f"{k},{float(graph.node_theta[k])!r},"
                     f"{float(graph.node_vartheta[k])!r}\n")
    with open(edge_path, "w") as fh:
        fh.write("i,j\n")
        for i, j in zip(graph.edge_i, graph.edge_j):
            fh.write(f"{i},{j}\n")


def graph_to_bundle(graph: SampledGraph) -> dict:
    return {
        "alpha": graph.alpha,
        "seed": graph.seed,
        "delta": graph.truncation_delta,
        "v_max": graph.v_max,
        "n_latent": graph.n_latent,
        "nodes": [[int(k), float(graph.node_theta[k]),
                   float(graph.node_vartheta[k])]
                  for k in range(graph.n_nodes)],
        "edges": [[int(i), int(j)]
                  for i, j in zip(graph.edge_i, graph.edge_j)],
    }


def bundle_to_graph(bundle: dict) -> SampledGraph:
    nodes = bundle["nodes"]
    edges = bundle["edges"]
    theta = np.array([n[1] for n in nodes], dtype=float)
    vartheta = np.array([n[2] for n in nodes], dtype=float)
    ei = np.array([e[0] for e in edges], dtype=np.int64)
    ej = np.array([e[1] for e in edges], dtype=np.int64)
    return SampledGraph(bundle["alpha"], bundle["seed"], bundle["delta"],
                        bundle["v_max"], bundle["n_latent"],
                        theta, vartheta, ei, ej)


def write_graph_json(graph: SampledGraph, path: str):
    with open(path, "w") as fh:
        json.dump(graph_to_bundle(graph), fh)


def read_graph_json(path: str) -> SampledGraph:
    with open(path) as fh:
        return bundle_to_graph(json.load(fh))
