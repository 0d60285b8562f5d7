"""Community-structured graphons W((u,v),(u',v')) = omega(v,v') eta(u,u').

The community coordinate v is uniform on [0,1] and omega is piecewise
constant on a partition A_1..A_p with symmetric link matrix B (a sparse
stochastic block-model once eta decays).  eta is a separable sparsity
kernel g(u)g(u'), so the marginal factorizes:

    mu((u,v)) = g(u) g_bar * mu_omega(block(v)),
    mu_omega(k) = sum_l |A_l| B[k,l].

The node-count asymptote keeps eta's tail exponent sigma and picks up the
blocking factor sum_k |A_k| mu_omega(k)^sigma in its slowly varying part.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import sampler as _sampler
from .graphon import GraphonModel, Kind, Regime, ValidationError, make_model
from .numerics import (gamma_fn, integrate_semi_infinite, invert_monotone)
from .rng import substream
from .sampler import (ResourceCapError, TAIL_BIAS_BUDGET, _fast_edges_arrays,
                      _retain, _weighted_choice, point_cap)

_ETA_KINDS = ("SeparablePower", "Exponential", "ExtremeSparse", "Indicator")


class _Eta:
    """Separable sparsity kernel eta(u,u') = g(u) g(u')."""

    def __init__(self, config: dict):
        if not isinstance(config, dict) or "kind" not in config:
            raise ValidationError("eta config must be a mapping with a kind")
        kind = config["kind"]
        if kind not in _ETA_KINDS:
            raise ValidationError(f"unsupported eta kind: {kind!r}")
        if kind == "Indicator":
            extra = set(config) - {"kind"}
            if extra:
                raise ValidationError(
                    f"unknown eta key(s): {', '.join(sorted(extra))}")
            self.base = None
            self.g_bar = 1.0
            self.sigma = 0.0
            self.support = 1.0
        else:
            self.base = make_model(config)
            if not self.base.is_separable():
                raise ValidationError(f"eta kind {kind} is not separable")
            # g(0) = 1 for all registered separable kinds, so int g = mu(0)
            self.g_bar = self.base.mean_degree(0.0)
            self.sigma = self.base.tail_profile().sigma
            self.support = math.inf
        self.kind = kind
        self._config = dict(config)

    def g_vec(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.base is None:
            return (u <= 1.0).astype(float)
        return self.base.separable_g_vec(u)

    def tail_g(self, v: float) -> float:
        """int_v^inf g."""
        if self.base is None:
            return max(1.0 - v, 0.0)
        return self.base.tail_mu_integral(v) / self.g_bar

    def tail_g_sq(self, v: float) -> float:
        """int_v^inf g^2."""
        if self.base is None:
            return max(1.0 - v, 0.0)
        if self.kind == "SeparablePower":
            s = self.base.sigma
            return s / (2.0 - s) * (1.0 + v) ** (-(2.0 - s) / s)
        if self.kind == "Exponential":
            return 0.5 * math.exp(-2.0 * v)
        g = self.base.separable_g_vec
        return integrate_semi_infinite(
            lambda x: float(g(np.array([x]))[0]) ** 2, v)

    def tail_quantile(self, v_star: float, q: np.ndarray) -> np.ndarray:
        if self.base is None:
            return v_star + q * (1.0 - v_star)
        return _sampler._tail_quantile(self.base, v_star, q)

    def ell(self, t: float) -> float:
        if self.base is None:
            return 1.0
        return self.base.tail_profile().ell(t)

    def config(self) -> dict:
        return dict(self._config)


@dataclass(frozen=True)
class LgSampledGraph:
    """SampledGraph plus per-node community data and its generating model."""
    alpha: float
    seed: int
    truncation_delta: float
    v_max: float
    n_latent: int
    node_theta: np.ndarray
    node_vartheta: np.ndarray   # the u coordinate
    node_v: np.ndarray          # community coordinate in [0,1]
    node_block: np.ndarray      # 0-based block labels
    edge_i: np.ndarray
    edge_j: np.ndarray
    model: "SparseSbmModel"

    @property
    def n_nodes(self) -> int:
        return self.node_theta.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edge_i.shape[0]


class SparseSbmModel:
    """Validated block model; immutable after construction."""

    kind = Kind.LocalGlobal

    def __init__(self, partition, b_matrix, eta: _Eta):
        self.breaks = np.asarray(partition, dtype=float)
        self.b = np.asarray(b_matrix, dtype=float)
        self.eta = eta
        self.widths = np.diff(self.breaks)
        self.p = self.widths.shape[0]
        self.mu_omega = self.b @ self.widths          # per-block
        self.omega_bar = float(self.widths @ self.mu_omega)
        self.max_b = float(self.b.max()) if self.b.size else 0.0
        # W-bar and diagonal mass of the combined graphon
        self.w_bar = eta.g_bar ** 2 * self.omega_bar
        self.diag_mass = (float(self.widths @ np.diag(self.b))
                          * eta.tail_g_sq(0.0))

    def total_mass(self) -> float:
        return self.w_bar

    def diagonal_mass(self) -> float:
        return self.diag_mass

    def prop7_factor(self) -> float:
        """sum_k |A_k| mu_omega(k)^sigma — the blocking correction to ell."""
        s = self.eta.sigma
        return float(np.sum(self.widths * np.power(self.mu_omega, s)))

    def block_of(self, v: np.ndarray) -> np.ndarray:
        lab = np.searchsorted(self.breaks, v, side="right") - 1
        return np.clip(lab, 0, self.p - 1).astype(np.int64)

    def evaluate(self, u1: float, v1: float, u2: float, v2: float) -> float:
        k1 = int(self.block_of(np.array([v1]))[0])
        k2 = int(self.block_of(np.array([v2]))[0])
        g = self.eta.g_vec(np.array([u1, u2]))
        return float(self.b[k1, k2] * g[0] * g[1])

    def config(self) -> dict:
        return {"kind": Kind.LocalGlobal.value,
                "partition": list(map(float, self.breaks)),
                "B": self.b.tolist(),
                "eta": self.eta.config()}

    def __repr__(self):
        return f"SparseSbmModel({self.config()})"


def make_sbm_model(partition, b_matrix, eta_config) -> SparseSbmModel:
    if partition is None or b_matrix is None or eta_config is None:
        raise ValidationError(
            "LocalGlobal model needs partition, B and eta entries")
    breaks = np.asarray(partition, dtype=float)
    if breaks.ndim != 1 or breaks.shape[0] < 2:
        raise ValidationError("partition must list at least two breakpoints")
    if breaks[0] != 0.0 or breaks[-1] != 1.0:
        raise ValidationError("partition must start at 0 and end at 1")
    if np.any(np.diff(breaks) <= 0.0):
        raise ValidationError("partition breakpoints must increase strictly")
    b = np.asarray(b_matrix, dtype=float)
    p = breaks.shape[0] - 1
    if b.shape != (p, p):
        raise ValidationError(f"B must be {p}x{p} to match the partition")
    if not np.allclose(b, b.T, rtol=0.0, atol=0.0):
        raise ValidationError("B must be symmetric")
    if np.any(b < 0.0) or np.any(b > 1.0):
        raise ValidationError("B entries must lie in [0, 1]")
    return SparseSbmModel(breaks, b, _Eta(eta_config))


def _lg_truncation(model: SparseSbmModel, delta: float) -> float:
    """u-cutoff with the same delta-fraction missed-edge budget as the
    plain sampler, using mu((u,v)) <= g_bar g(u) max_k mu_omega(k)."""
    if not 0.0 < delta < 1.0:
        raise ValidationError(f"delta must be in (0,1), got {delta}")
    eta = model.eta
    if eta.base is None:
        return 1.0
    max_mu = float(model.mu_omega.max())
    if max_mu <= 0.0:
        return 1.0
    target = delta * eta.g_bar * model.omega_bar / (2.0 * max_mu)
    if eta.kind == "SeparablePower":
        s = eta.base.sigma
        lead = s / (1.0 - s)
        return (target / lead) ** (-s / (1.0 - s)) - 1.0
    if eta.kind == "Exponential":
        return math.log(1.0 / target)
    hi = 1.0
    while eta.tail_g(hi) > target:
        hi *= 2.0
        if hi > 1e300:
            return math.inf
    return invert_monotone(eta.tail_g, target, hi)


def _lg_core_level(model: SparseSbmModel, alpha: float) -> float:
    """Core cutoff keeping expected tail collisions under budget."""
    eta = model.eta
    sq_factor = float(np.sum(model.widths * model.mu_omega ** 2))
    coef = alpha ** 3 / 2.0 * eta.g_bar ** 2 * sq_factor
    target = TAIL_BIAS_BUDGET / coef
    if eta.tail_g_sq(0.0) <= target:
        # the whole line already fits the collision budget (small alpha):
        # any cutoff works, so keep a unit core
        return 1.0
    hi = 1.0
    while eta.tail_g_sq(hi) > target:
        hi *= 2.0
        if hi * alpha > point_cap():
            raise ResourceCapError(
                "local-global hybrid core would exceed the point cap")
    return invert_monotone(eta.tail_g_sq, target, hi)


def _materialize(model: SparseSbmModel, alpha: float, u_max: float,
                 seed: int):
    mean = alpha * u_max
    cap = point_cap()
    if not math.isfinite(mean) or mean > 10.0 * cap:
        raise ResourceCapError(
            f"expected latent point count {mean} exceeds cap {cap}")
    rng = substream(seed, 0)
    k = int(rng.poisson(mean))
    if k > cap:
        raise ResourceCapError(f"latent point count {k} exceeds cap {cap}")
    theta = rng.uniform(0.0, alpha, size=k)
    u = rng.uniform(0.0, u_max, size=k)
    v = rng.uniform(0.0, 1.0, size=k)
    return theta, u, v


def _finish(model, alpha, seed, delta, v_max, n_latent,
            theta, u, v, labels, ei, ej) -> LgSampledGraph:
    base = _retain(alpha, seed, delta, v_max, n_latent, theta, u, ei, ej)
    if base.edge_i.shape[0]:
        used = np.unique(np.concatenate([ei, ej]))
    else:
        used = np.empty(0, dtype=np.int64)
    return LgSampledGraph(alpha, seed, delta, v_max, n_latent,
                          base.node_theta, base.node_vartheta,
                          v[used], labels[used],
                          base.edge_i, base.edge_j, model)


def sample_lg_graph(model: SparseSbmModel, alpha: float, seed: int,
                    delta: float = 1e-3) -> LgSampledGraph:
    """Sample the community-structured graph.

    Materializes the truncated point set whenever it fits; otherwise uses
    the hybrid deep-tail construction (bounded, documented node bias).
    """
    if model.max_b == 0.0:
        empty = np.empty(0, dtype=np.int64)
        return LgSampledGraph(alpha, seed, delta, 0.0, 0,
                              np.empty(0), np.empty(0), np.empty(0),
                              empty.copy(), empty, empty.copy(), model)
    v_max = _lg_truncation(model, delta)
    if math.isfinite(v_max) and alpha * v_max <= point_cap():
        theta, u, v = _materialize(model, alpha, v_max, seed)
        labels = model.block_of(v)
        a = model.eta.g_vec(u)
        ghat = math.sqrt(model.max_b) * a
        rng = substream(seed, 1)
        ei, ej = _fast_edges_arrays(a, ghat, 3, 0.0, rng, model.b, labels)
        return _finish(model, alpha, seed, delta, v_max, theta.shape[0],
                       theta, u, v, labels, ei, ej)
    return _sample_lg_hybrid(model, alpha, seed, delta, v_max)


def _sample_lg_hybrid(model: SparseSbmModel, alpha: float, seed: int,
                      delta: float, v_max: float) -> LgSampledGraph:
    eta = model.eta
    u_star = _lg_core_level(model, alpha)
    theta, u, v = _materialize(model, alpha, u_star, seed)
    labels = model.block_of(v)
    a = eta.g_vec(u)
    ghat = math.sqrt(model.max_b) * a
    rng = substream(seed, 1)
    ei, ej = _fast_edges_arrays(a, ghat, 3, 0.0, rng, model.b, labels)

    trng = substream(seed, 2)
    g_tail = eta.tail_g(u_star)
    n0 = theta.shape[0]
    theta_parts, u_parts, v_parts = [theta], [u], [v]
    ei_parts, ej_parts = [ei], [ej]
    next_id = n0

    # block-sampling helpers: row k of cum_cross is the CDF over the tail
    # endpoint's block given a core endpoint in block k
    cross = model.widths[None, :] * model.b          # p x p, rows ~ core block
    cum_cross = np.cumsum(cross, axis=1)
    row_tot = cum_cross[:, -1]

    def _tail_nodes(count, blocks):
        """Fresh tail nodes: thetas, u from the tail density, v in blocks."""
        th = trng.uniform(0.0, alpha, size=count)
        uu = eta.tail_quantile(u_star, trng.uniform(size=count))
        lo = model.breaks[blocks]
        hi = model.breaks[blocks + 1]
        vv = lo + trng.uniform(size=count) * (hi - lo)
        return th, uu, vv

    # core-tail attachments
    w_core = a * model.mu_omega[labels]
    sum_w = float(w_core.sum())
    n_ct = int(trng.poisson(alpha * g_tail * sum_w)) if sum_w > 0.0 else 0
    if n_ct:
        cum_w = np.cumsum(w_core)
        core_end = _weighted_choice(trng, w_core, cum_w, n_ct)
        ck = labels[core_end]
        r = trng.uniform(size=n_ct) * row_tot[ck]
        tail_block = np.empty(n_ct, dtype=np.int64)
        for k in range(model.p):
            sel = ck == k
            if np.any(sel):
                tail_block[sel] = np.searchsorted(cum_cross[k], r[sel],
                                                  side="left")
        th, uu, vv = _tail_nodes(n_ct, tail_block)
        ids = np.arange(next_id, next_id + n_ct, dtype=np.int64)
        next_id += n_ct
        theta_parts.append(th)
        u_parts.append(uu)
        v_parts.append(vv)
        ei_parts.append(np.minimum(core_end, ids))
        ej_parts.append(np.maximum(core_end, ids))

    # tail-tail pairs
    pair_w = (model.widths[:, None] * model.widths[None, :] * model.b).ravel()
    pair_tot = float(pair_w.sum())
    n_tt = int(trng.poisson(alpha * alpha * g_tail * g_tail
                            * pair_tot / 2.0)) if pair_tot > 0.0 else 0
    if n_tt:
        cum_p = np.cumsum(pair_w)
        flat = _weighted_choice(trng, pair_w, cum_p, n_tt)
        bk = (flat // model.p).astype(np.int64)
        bl = (flat % model.p).astype(np.int64)
        th_a, uu_a, vv_a = _tail_nodes(n_tt, bk)
        th_b, uu_b, vv_b = _tail_nodes(n_tt, bl)
        ids_a = np.arange(next_id, next_id + n_tt, dtype=np.int64)
        ids_b = ids_a + n_tt
        next_id += 2 * n_tt
        theta_parts.extend([th_a, th_b])
        u_parts.extend([uu_a, uu_b])
        v_parts.extend([vv_a, vv_b])
        ei_parts.append(ids_a)
        ej_parts.append(ids_b)

    theta_all = np.concatenate(theta_parts)
    u_all = np.concatenate(u_parts)
    v_all = np.concatenate(v_parts)
    labels_all = model.block_of(v_all)
    ei_all = np.concatenate(ei_parts).astype(np.int64)
    ej_all = np.concatenate(ej_parts).astype(np.int64)
    return _finish(model, alpha, seed, delta, v_max, int(next_id),
                   theta_all, u_all, v_all, labels_all, ei_all, ej_all)


def lg_expected_nodes(model: SparseSbmModel, alpha: float) -> float:
    """Exact E(N): per-block Campbell integral, summed over blocks."""
    eta = model.eta
    total = 0.0
    for k in range(model.p):
        bkk = model.b[k, k]
        mo = model.mu_omega[k]

        def f(x: float) -> float:
            # -expm1 form avoids cancellation when the exponent is tiny
            g = float(eta.g_vec(np.array([x]))[0])
            w_self = bkk * g * g
            expo = alpha * eta.g_bar * g * mo
            return -math.expm1(-expo) + w_self * math.exp(-expo)

        if eta.base is None:
            from .numerics import integrate_interval
            block_val = integrate_interval(f, 0.0, 1.0)
        else:
            block_val = integrate_semi_infinite(f, 0.0)
        total += model.widths[k] * block_val
    return alpha * total


def lg_asymptotic_nodes(model: SparseSbmModel, alpha: float) -> float:
    """Node asymptote with ell replaced by ell times the blocking factor."""
    s = model.eta.sigma
    if s >= 1.0:
        raise ValidationError(
            "asymptotic node count implemented for sigma < 1 only")
    return (alpha ** (1.0 + s) * gamma_fn(1.0 - s)
            * model.eta.ell(alpha) * model.prop7_factor())


def block_link_matrix(graph: LgSampledGraph) -> np.ndarray:
    """Estimate B from one sampled graph.

    Entry (k,l) divides the observed cross-block edge count by a
    Horvitz-Thompson exposure: each retained node contributes weight
    g(u_i)/r_i with r_i its retention probability, which removes the
    degree->=1 selection bias that plain retained-pair exposure suffers.
    """
    if graph.n_edges < 1:
        raise ValidationError("block_link_matrix needs at least one edge")
    model = graph.model
    eta = model.eta
    p = model.p
    alpha = graph.alpha

    g = eta.g_vec(graph.node_vartheta)
    k_lab = graph.node_block
    mo = model.mu_omega[k_lab]
    w_self = np.diag(model.b)[k_lab] * g * g
    r = 1.0 - (1.0 - w_self) * np.exp(-alpha * eta.g_bar * g * mo)
    w = np.where(r > 0.0, g / np.maximum(r, 1e-300), 0.0)

    s_k = np.zeros(p)
    ss_k = np.zeros(p)
    np.add.at(s_k, k_lab, w)
    np.add.at(ss_k, k_lab, w * w)

    loops = graph.edge_i == graph.edge_j
    bi = k_lab[graph.edge_i[~loops]]
    bj = k_lab[graph.edge_j[~loops]]
    counts = np.zeros((p, p))
    np.add.at(counts, (np.minimum(bi, bj), np.maximum(bi, bj)), 1.0)
    counts = counts + np.triu(counts, k=1).T

    exposure = np.outer(s_k, s_k)
    np.fill_diagonal(exposure, (s_k * s_k - ss_k) / 2.0)

    empty = s_k <= 0.0
    if np.any(empty):
        warnings.warn(
            f"blocks without retained nodes: {np.nonzero(empty)[0].tolist()}",
            RuntimeWarning)
    with np.errstate(divide="ignore", invalid="ignore"):
        est = np.where(exposure > 0.0, counts / exposure, np.nan)
    return est
