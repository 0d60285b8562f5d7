"""Registry of graphon models.

Each model describes a symmetric link-probability function W on the positive
quadrant together with the derived quantities the rest of the package needs:
the marginal mu(x) = int W(x, y) dy, its generalized inverse, the total mass
W-bar = int int W, the diagonal mass int W(x, x) dx, the tail integral
int_v^inf mu (for truncation), and the tail profile (sigma, slowly varying
factors, sparsity regime).

Closed forms are authoritative wherever they exist; quadrature counterparts
are exposed alongside them as cross-checks (`total_mass_quadrature`,
`mean_degree_quadrature`, ...), never silently substituted.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import numerics
from .numerics import (DEFAULT_QUADRATURE, QuadratureSpec, gamma_fn,
                       integrate_interval, integrate_semi_infinite,
                       invert_monotone, upper_incomplete_gamma,
                       upper_incomplete_gamma_vec)


class ValidationError(ValueError):
    """Model configuration is malformed or out of range."""


class Kind(enum.Enum):
    DenseCompact = "DenseCompact"
    Exponential = "Exponential"
    SeparablePower = "SeparablePower"
    NonSeparablePower = "NonSeparablePower"
    ExtremeSparse = "ExtremeSparse"
    GGP = "GGP"
    LocalGlobal = "LocalGlobal"


class Regime(enum.Enum):
    Dense = "Dense"
    AlmostDense = "AlmostDense"
    SparsePowerLaw = "SparsePowerLaw"
    AlmostExtremelySparse = "AlmostExtremelySparse"


@dataclass(frozen=True)
class TailProfile:
    """Tail behavior of mu^{-1}: mu^{-1}(x) ~ ell(1/x) x^{-sigma} as x -> 0."""

    sigma: float
    regime: Regime
    ell: Callable[[float], float]
    ell_star: Callable[[float], float]
    ell1: Optional[Callable[[float], float]] = None


class GraphonModel:
    """Immutable graphon description; see module docstring.

    Subclasses fill in the closed forms; this base class provides the
    quadrature cross-check paths and shared conveniences.
    """

    kind: Kind

    def __init__(self):
        self.w_bar: float = 0.0
        self.diag_mass: float = 0.0

    # ---- primary evaluators (closed form, overridden per kind) ----

    def evaluate(self, x: float, y: float) -> float:
        raise NotImplementedError

    def mean_degree(self, x: float) -> float:
        raise NotImplementedError

    def mean_degree_vec(self, x: np.ndarray) -> np.ndarray:
        return np.array([self.mean_degree(float(v)) for v in np.asarray(x)])

    def mean_degree_max(self) -> float:
        """sup_x mu(x) = mu(0+); may be inf."""
        raise NotImplementedError

    def mean_degree_inverse(self, u: float) -> float:
        raise NotImplementedError

    def total_mass(self) -> float:
        return self.w_bar

    def diagonal_mass(self) -> float:
        return self.diag_mass

    def tail_mu_integral(self, v: float) -> float:
        """int_v^inf mu(x) dx (expected edge stubs beyond sociability v)."""
        raise NotImplementedError

    def tail_profile(self) -> TailProfile:
        raise NotImplementedError

    # ---- sampler plumbing ----

    def kernel_spec(self):
        """(form id, exponent, transform) driving the all-pairs kernel.

        transform maps an array of sociabilities to the per-node weight
        array the kernel consumes.
        """
        raise NotImplementedError

    def separable_g_vec(self, x: np.ndarray) -> np.ndarray:
        """g with W(x,y) = g(x) g(y); only for separable kinds."""
        raise NotImplementedError

    def is_separable(self) -> bool:
        return False

    # ---- quadrature cross-checks ----

    def mean_degree_quadrature(self, x: float,
                               spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
        return integrate_semi_infinite(lambda y: self.evaluate(x, y), 0.0, spec)

    def total_mass_quadrature(self,
                              spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
        return integrate_semi_infinite(lambda x: self.mean_degree(x), 0.0, spec)

    def diagonal_mass_quadrature(self,
                                 spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
        return integrate_semi_infinite(lambda x: self.evaluate(x, x), 0.0, spec)

    def config(self) -> dict:
        return {"kind": self.kind.value}

    def __repr__(self):
        return f"GraphonModel({self.config()})"


class _DenseCompact(GraphonModel):
    """W(x,y) = (1-x)(1-y) on the unit square, zero outside."""

    kind = Kind.DenseCompact

    def __init__(self):
        super().__init__()
        self.w_bar = 0.25
        self.diag_mass = 1.0 / 3.0

    def _g(self, x: float) -> float:
        return 1.0 - x if x <= 1.0 else 0.0

    def evaluate(self, x, y):
        return self._g(x) * self._g(y)

    def mean_degree(self, x):
        return 0.5 * self._g(x)

    def mean_degree_vec(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * np.clip(1.0 - x, 0.0, None)

    def mean_degree_max(self):
        return 0.5

    def mean_degree_inverse(self, u):
        if not 0 < u < 0.5:
            raise numerics.BracketError(f"u={u} outside (0, mu(0)=0.5)")
        return 1.0 - 2.0 * u

    def tail_mu_integral(self, v):
        if v >= 1.0:
            return 0.0
        return 0.25 * (1.0 - v) ** 2

    def tail_profile(self):
        return TailProfile(
            sigma=0.0,
            regime=Regime.Dense,
            ell=lambda t: (1.0 - 2.0 / t) if t >= 2.0 else 0.0,
            ell_star=lambda n: 1.0,
        )

    def kernel_spec(self):
        return 0, 0.0, self.separable_g_vec

    def separable_g_vec(self, x):
        return np.clip(1.0 - np.asarray(x, dtype=float), 0.0, None)

    def is_separable(self):
        return True


class _Exponential(GraphonModel):
    """W(x,y) = exp(-x-y)."""

    kind = Kind.Exponential

    def __init__(self):
        super().__init__()
        self.w_bar = 1.0
        self.diag_mass = 0.5

    def evaluate(self, x, y):
        return math.exp(-x - y)

    def mean_degree(self, x):
        return math.exp(-x)

    def mean_degree_vec(self, x):
        return np.exp(-np.asarray(x, dtype=float))

    def mean_degree_max(self):
        return 1.0

    def mean_degree_inverse(self, u):
        if not 0 < u < 1.0:
            raise numerics.BracketError(f"u={u} outside (0, mu(0)=1)")
        return math.log(1.0 / u)

    def tail_mu_integral(self, v):
        return math.exp(-v)

    def tail_profile(self):
        return TailProfile(
            sigma=0.0,
            regime=Regime.AlmostDense,
            ell=math.log,
            ell_star=lambda n: 1.0 / math.log(n) ** 2,
        )

    def kernel_spec(self):
        return 0, 0.0, self.separable_g_vec

    def separable_g_vec(self, x):
        return np.exp(-np.asarray(x, dtype=float))

    def is_separable(self):
        return True


class _SeparablePower(GraphonModel):
    """W(x,y) = (1+x)^{-1/sigma} (1+y)^{-1/sigma}, sigma in (0,1)."""

    kind = Kind.SeparablePower

    def __init__(self, sigma: float):
        super().__init__()
        self.sigma = sigma
        s = sigma
        self.w_bar = s * s / (1.0 - s) ** 2
        self.diag_mass = s / (2.0 - s)
        self._mu0 = s / (1.0 - s)
        # constant limit of ell: (1/sigma - 1)^{-sigma}
        self._ell_const = (1.0 / s - 1.0) ** (-s)

    def _g(self, x: float) -> float:
        return (1.0 + x) ** (-1.0 / self.sigma)

    def evaluate(self, x, y):
        return self._g(x) * self._g(y)

    def mean_degree(self, x):
        return self._mu0 * self._g(x)

    def mean_degree_vec(self, x):
        x = np.asarray(x, dtype=float)
        return self._mu0 * np.power(1.0 + x, -1.0 / self.sigma)

    def mean_degree_max(self):
        return self._mu0

    def mean_degree_inverse(self, u):
        if not 0 < u < self._mu0:
            raise numerics.BracketError(f"u={u} outside (0, mu(0)={self._mu0})")
        return u ** (-self.sigma) * self._ell_const - 1.0

    def tail_mu_integral(self, v):
        s = self.sigma
        return (s / (1.0 - s)) ** 2 * (1.0 + v) ** (-(1.0 - s) / s)

    def tail_profile(self):
        s = self.sigma
        c = self._ell_const
        ell_star_const = (c * gamma_fn(1.0 - s)) ** (-2.0 / (1.0 + s))
        return TailProfile(
            sigma=s,
            regime=Regime.SparsePowerLaw,
            ell=lambda t: c,
            ell_star=lambda n: ell_star_const,
        )

    def kernel_spec(self):
        return 0, 0.0, self.separable_g_vec

    def separable_g_vec(self, x):
        return np.power(1.0 + np.asarray(x, dtype=float), -1.0 / self.sigma)

    def is_separable(self):
        return True

    def config(self):
        return {"kind": self.kind.value, "sigma": self.sigma}


class _NonSeparablePower(GraphonModel):
    """W(x,y) = (x+y+1)^{-1/sigma-1}, sigma in (0,1)."""

    kind = Kind.NonSeparablePower

    def __init__(self, sigma: float):
        super().__init__()
        self.sigma = sigma
        s = sigma
        self.w_bar = s * s / (1.0 - s)
        self.diag_mass = s / 2.0
        self._expo = -1.0 / s - 1.0

    def evaluate(self, x, y):
        return (x + y + 1.0) ** self._expo

    def mean_degree(self, x):
        return self.sigma * (1.0 + x) ** (-1.0 / self.sigma)

    def mean_degree_vec(self, x):
        x = np.asarray(x, dtype=float)
        return self.sigma * np.power(1.0 + x, -1.0 / self.sigma)

    def mean_degree_max(self):
        return self.sigma

    def mean_degree_inverse(self, u):
        if not 0 < u < self.sigma:
            raise numerics.BracketError(f"u={u} outside (0, mu(0)={self.sigma})")
        s = self.sigma
        return s ** s * u ** (-s) - 1.0

    def tail_mu_integral(self, v):
        s = self.sigma
        return s * s / (1.0 - s) * (1.0 + v) ** (-(1.0 - s) / s)

    def tail_profile(self):
        s = self.sigma
        c = s ** s
        ell_star_const = (c * gamma_fn(1.0 - s)) ** (-2.0 / (1.0 + s))
        return TailProfile(
            sigma=s,
            regime=Regime.SparsePowerLaw,
            ell=lambda t: c,
            ell_star=lambda n: ell_star_const,
        )

    def kernel_spec(self):
        return 1, self._expo, lambda x: np.asarray(x, dtype=float)

    def envelope_g_vec(self, x: np.ndarray) -> np.ndarray:
        """g-hat with W(x,y) <= g-hat(x) g-hat(y), from the AM-GM bound
        x+y+1 >= sqrt((1+x)(1+y))."""
        return np.power(1.0 + np.asarray(x, dtype=float),
                        0.5 * self._expo)

    def config(self):
        return {"kind": self.kind.value, "sigma": self.sigma}


class _ExtremeSparse(GraphonModel):
    """W(x,y) = g(x)g(y), g(x) = 1/((1+x)(1+log(1+x))^2); sigma = 1."""

    kind = Kind.ExtremeSparse

    def __init__(self):
        super().__init__()
        self.w_bar = 1.0  # int g = [ -1/(1+log(1+x)) ] from 0 to inf = 1
        # no closed form for int g^2; substitute s = log(1+x)
        self.diag_mass = integrate_semi_infinite(
            lambda s: math.exp(-s) / (1.0 + s) ** 4, 0.0)

    def _g(self, x: float) -> float:
        return 1.0 / ((1.0 + x) * (1.0 + math.log1p(x)) ** 2)

    def evaluate(self, x, y):
        return self._g(x) * self._g(y)

    def mean_degree(self, x):
        return self._g(x)  # int g = 1, so mu = g

    def mean_degree_vec(self, x):
        return self.separable_g_vec(x)

    def mean_degree_max(self):
        return 1.0

    def mean_degree_inverse(self, u):
        if not 0 < u < 1.0:
            raise numerics.BracketError(f"u={u} outside (0, mu(0)=1)")
        hi = 1.0
        while self._g(hi) > u:
            hi *= 2.0
            if hi > 1e306:
                raise numerics.BracketError("mean_degree_inverse overflow")
        return invert_monotone(self._g, u, hi)

    def tail_mu_integral(self, v):
        return 1.0 / (1.0 + math.log1p(v))

    def tail_profile(self):
        return TailProfile(
            sigma=1.0,
            regime=Regime.AlmostExtremelySparse,
            ell=lambda t: math.log(t) ** (-2.0),
            ell1=lambda t: 1.0 / math.log(t),
            ell_star=lambda n: 0.5 * math.log(n),
        )

    def kernel_spec(self):
        return 0, 0.0, self.separable_g_vec

    def separable_g_vec(self, x):
        x = np.asarray(x, dtype=float)
        return 1.0 / ((1.0 + x) * (1.0 + np.log1p(x)) ** 2)

    def is_separable(self):
        return True


class _Ggp(GraphonModel):
    """Link function built on a generalized-gamma completely random measure.

    W(x,y) = 1 - exp(-2 r(x) r(y)) off-diagonal, 1 - exp(-r(x)^2) on the
    diagonal, where r is the inverse of the Levy tail intensity
    rho_bar(w) = tau0^{sigma0} Gamma(-sigma0, tau0 w) / Gamma(1-sigma0)
    (the exponential-integral E1(tau0 w) when sigma0 = 0).
    """

    kind = Kind.GGP

    _INV_TABLE_SIZE = 1 << 15

    def __init__(self, sigma0: float, tau0: float):
        super().__init__()
        self.sigma0 = sigma0
        self.tau0 = tau0
        self.m_rho = tau0 ** (sigma0 - 1.0)  # int w rho(dw)
        # rho_bar(0+): finite only for sigma0 < 0
        if sigma0 < 0:
            self.rho_bar0 = -(tau0 ** sigma0) / sigma0
        else:
            self.rho_bar0 = math.inf
        self.w_bar = self._w_space_integral(
            lambda w: self._psi(2.0 * w) * self._rho_density(w))
        self.diag_mass = self._w_space_integral(
            lambda w: -math.expm1(-w * w) * self._rho_density(w))

    # -- Levy measure pieces (everything integrates in w-space) --

    def _rho_density(self, w: float) -> float:
        s0, t0 = self.sigma0, self.tau0
        return w ** (-1.0 - s0) * math.exp(-t0 * w) / gamma_fn(1.0 - s0)

    def _psi(self, t: float) -> float:
        # expm1/log1p form avoids the catastrophic cancellation of
        # ((t0+t)^s0 - t0^s0) for t << t0
        s0, t0 = self.sigma0, self.tau0
        if s0 != 0.0:
            return t0 ** s0 * math.expm1(s0 * math.log1p(t / t0)) / s0
        return math.log1p(t / t0)

    def _psi_vec(self, t: np.ndarray) -> np.ndarray:
        s0, t0 = self.sigma0, self.tau0
        t = np.asarray(t, dtype=float)
        if s0 != 0.0:
            return t0 ** s0 * np.expm1(s0 * np.log1p(t / t0)) / s0
        return np.log1p(t / t0)

    def _psi_inv(self, u: float) -> float:
        s0, t0 = self.sigma0, self.tau0
        if s0 != 0.0:
            return t0 * math.expm1(
                math.log1p(s0 * u * t0 ** (-s0)) / s0)
        return t0 * math.expm1(u)

    def rho_bar(self, w: float) -> float:
        s0, t0 = self.sigma0, self.tau0
        if w <= 0.0:
            return self.rho_bar0
        if s0 != 0.0:
            return (t0 ** s0 * upper_incomplete_gamma(-s0, t0 * w)
                    / gamma_fn(1.0 - s0))
        return upper_incomplete_gamma(0.0, t0 * w)

    def rho_bar_vec(self, w: np.ndarray) -> np.ndarray:
        s0, t0 = self.sigma0, self.tau0
        w = np.asarray(w, dtype=float)
        return (t0 ** s0 / gamma_fn(1.0 - s0)
                * upper_incomplete_gamma_vec(-s0, t0 * w)
                if s0 != 0.0 else upper_incomplete_gamma_vec(0.0, t0 * w))

    def rho_bar_inv(self, x: float) -> float:
        """Scalar inverse of rho_bar by bracketed bisection (exact path).

        Geometric bisection: rho_bar spans hundreds of orders of magnitude
        near 0, so the search runs on log w.
        """
        if x >= self.rho_bar0:
            return 0.0
        lo = 1e-308
        if self.rho_bar(lo) <= x:
            return 0.0  # inverse below float resolution
        hi = 1.0
        while self.rho_bar(hi) > x:
            hi *= 2.0
        # bisect on log w (the midpoint lo*hi would underflow near 1e-308)
        log_lo, log_hi = math.log(lo), math.log(hi)
        for _ in range(200):
            log_mid = 0.5 * (log_lo + log_hi)
            mid = math.exp(log_mid)
            if mid <= math.exp(log_lo) or mid >= math.exp(log_hi):
                break
            if self.rho_bar(mid) > x:
                log_lo = log_mid
            else:
                log_hi = log_mid
        return math.exp(log_hi)

    def rho_bar_inv_vec(self, x: np.ndarray) -> np.ndarray:
        """Vectorized inverse via a log-log interpolation table.

        Used by the sampler for bulk sociability transforms; relative error
        of the table is ~1e-6, far below Monte Carlo noise.  Scalar oracle
        paths use the exact bisection above.
        """
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        active = x < self.rho_bar0 * (1.0 - 1e-12) if math.isfinite(
            self.rho_bar0) else np.ones_like(x, dtype=bool)
        if not np.any(active):
            return out
        xa = x[active]
        w_lo = self.rho_bar_inv(float(xa.max()))
        w_hi = self.rho_bar_inv(float(xa.min()))
        if w_lo <= 0.0:
            w_lo = w_hi * 1e-12
        if w_hi <= w_lo * (1.0 + 1e-9):
            out[active] = w_hi
            return out
        grid_w = np.geomspace(w_lo * 0.5, w_hi * 2.0, self._INV_TABLE_SIZE)
        grid_x = self.rho_bar_vec(grid_w)  # decreasing in w
        logw = np.interp(np.log(xa), np.log(grid_x[::-1]),
                         np.log(grid_w[::-1]))
        out[active] = np.exp(logw)
        return out

    def _w_space_integral(self, f, upper: float = math.inf) -> float:
        """int_0^upper f(w) dw with the w = s^{1/(1-sigma0)} substitution
        flattening the w^{-sigma0}-type endpoint behavior at 0."""
        b = 1.0 / (1.0 - self.sigma0)

        def transformed(s: float) -> float:
            if s <= 0.0:
                return 0.0
            w = s ** b
            return f(w) * b * s ** (b - 1.0)

        if math.isinf(upper):
            return integrate_semi_infinite(transformed, 0.0)
        return integrate_interval(transformed, 0.0, upper ** (1.0 / b))

    # -- graphon API --

    def evaluate(self, x, y):
        rx = self.rho_bar_inv(x)
        if x == y:
            return -math.expm1(-rx * rx)
        ry = self.rho_bar_inv(y)
        return -math.expm1(-2.0 * rx * ry)

    def mean_degree(self, x):
        return self._psi(2.0 * self.rho_bar_inv(x))

    def mean_degree_vec(self, x):
        return self._psi_vec(2.0 * self.rho_bar_inv_vec(x))

    def mean_degree_max(self):
        if self.sigma0 < 0:
            return self._psi_limit()
        return math.inf

    def _psi_limit(self) -> float:
        # psi(inf), finite only for sigma0 < 0
        return -(self.tau0 ** self.sigma0) / self.sigma0

    def mean_degree_inverse(self, u):
        if u <= 0 or u >= self.mean_degree_max():
            raise numerics.BracketError(f"u={u} outside (0, mu(0))")
        return self.rho_bar(self._psi_inv(u) / 2.0)

    def tail_mu_integral(self, v):
        w_v = self.rho_bar_inv(v)
        if w_v <= 0.0:
            return 0.0
        return self._w_space_integral(
            lambda w: self._psi(2.0 * w) * self._rho_density(w), upper=w_v)

    def tail_profile(self):
        s0, t0 = self.sigma0, self.tau0
        two_m = 2.0 * self.m_rho
        if s0 > 0:
            c = two_m ** s0 / (s0 * gamma_fn(1.0 - s0))
            ell_star_const = (two_m ** s0 / s0) ** (-2.0 / (1.0 + s0))
            return TailProfile(sigma=s0, regime=Regime.SparsePowerLaw,
                               ell=lambda t: c,
                               ell_star=lambda n: ell_star_const)
        if s0 == 0:
            return TailProfile(
                sigma=0.0, regime=Regime.AlmostDense,
                ell=lambda t: float(upper_incomplete_gamma(0.0,
                                                           t0 / (two_m * t))),
                ell_star=lambda n: float(
                    upper_incomplete_gamma(0.0, t0 / (two_m * n))) ** (-2.0))
        cap = self.rho_bar0
        return TailProfile(sigma=0.0, regime=Regime.Dense,
                           ell=lambda t: self.rho_bar(1.0 / (two_m * t)),
                           ell_star=lambda n: cap ** (-2.0))

    def kernel_spec(self):
        return 2, 0.0, self.rho_bar_inv_vec

    def envelope_f(self, x: float) -> float:
        """f with W(x,y) <= f(x)f(y)/f_bar (1 - e^{-z} <= z bound)."""
        return 2.0 * self.m_rho * self.rho_bar_inv(x)

    @property
    def f_bar(self) -> float:
        return 2.0 * self.m_rho ** 2

    def config(self):
        return {"kind": self.kind.value, "sigma0": self.sigma0,
                "tau0": self.tau0}


_SIMPLE_KINDS = {
    Kind.DenseCompact: _DenseCompact,
    Kind.Exponential: _Exponential,
    Kind.ExtremeSparse: _ExtremeSparse,
}

_ALLOWED_KEYS = {
    Kind.DenseCompact: {"kind"},
    Kind.Exponential: {"kind"},
    Kind.ExtremeSparse: {"kind"},
    Kind.SeparablePower: {"kind", "sigma"},
    Kind.NonSeparablePower: {"kind", "sigma"},
    Kind.GGP: {"kind", "sigma0", "tau0"},
    Kind.LocalGlobal: {"kind", "partition", "B", "eta"},
}


def make_model(config: dict) -> GraphonModel:
    """Build a validated model from a configuration record.

    Strict parsing: unknown keys and out-of-range parameters raise
    ValidationError naming the offending key.
    """
    if not isinstance(config, dict):
        raise ValidationError("model config must be a mapping")
    if "kind" not in config:
        raise ValidationError("missing key: kind")
    try:
        kind = Kind(config["kind"])
    except ValueError:
        raise ValidationError(f"unknown kind: {config['kind']!r}") from None
    extra = set(config) - _ALLOWED_KEYS[kind]
    if extra:
        raise ValidationError(
            f"unknown key(s) for {kind.value}: {', '.join(sorted(extra))}")

    if kind in _SIMPLE_KINDS:
        return _SIMPLE_KINDS[kind]()
    if kind in (Kind.SeparablePower, Kind.NonSeparablePower):
        if "sigma" not in config:
            raise ValidationError("missing key: sigma")
        sigma = float(config["sigma"])
        if not 0.0 < sigma < 1.0:
            raise ValidationError(f"sigma must be in (0,1), got {sigma}")
        cls = (_SeparablePower if kind is Kind.SeparablePower
               else _NonSeparablePower)
        return cls(sigma)
    if kind is Kind.GGP:
        for key in ("sigma0", "tau0"):
            if key not in config:
                raise ValidationError(f"missing key: {key}")
        sigma0 = float(config["sigma0"])
        tau0 = float(config["tau0"])
        if not -1.0 < sigma0 < 1.0:
            raise ValidationError(f"sigma0 must be in (-1,1), got {sigma0}")
        if tau0 <= 0.0:
            raise ValidationError(f"tau0 must be positive, got {tau0}")
        return _Ggp(sigma0, tau0)
    # LocalGlobal: delegated to the community-structure module
    from .localglobal import make_sbm_model
    return make_sbm_model(config.get("partition"), config.get("B"),
                          config.get("eta"))
