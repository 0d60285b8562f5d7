"""Oracle layer: exact expectations, asymptotes, Tauberian and margin checks."""

import json
import math

import numpy as np
import pytest

from graphex import make_model
from graphex.asymptotics import (SigmaOneFractionError, assumption2_margin,
                                 asymptotic_degree_fraction,
                                 asymptotic_node_count,
                                 edges_from_nodes_prediction,
                                 expected_degree_count_exact,
                                 expected_edges_exact, expected_nodes_exact,
                                 nu, oracle_values, tauberian_defaults,
                                 tauberian_ratio, write_oracle_report)


class TestExpectedEdges:
    def test_closed_values(self):
        m = make_model({"kind": "DenseCompact"})
        assert expected_edges_exact(m, 10.0) == pytest.approx(
            12.5 + 10.0 / 3.0, rel=1e-12)
        m = make_model({"kind": "Exponential"})
        assert expected_edges_exact(m, 10.0) == pytest.approx(55.0, rel=1e-12)

    def test_vanishes_at_zero(self):
        m = make_model({"kind": "Exponential"})
        assert expected_edges_exact(m, 1e-9) < 1e-8


class TestExpectedNodes:
    def test_dense_ratio(self):
        m = make_model({"kind": "DenseCompact"})
        val = expected_nodes_exact(m, 100.0)
        assert abs(val / 100.0 - 1.0) < 0.10   # N ~ alpha

    def test_separable_power_asymptote(self):
        # N ~ sqrt(pi) alpha^{3/2} for sigma = 1/2
        m = make_model({"kind": "SeparablePower", "sigma": 0.5})
        val = expected_nodes_exact(m, 1e4)
        assert abs(val / (math.sqrt(math.pi) * 1e4 ** 1.5) - 1.0) < 0.03

    def test_extreme_sparse_reference(self):
        # frozen 30-digit reference from an independent high-precision
        # evaluation of alpha * int (1-(1-W)e^{-alpha mu}) including the
        # analytic remainder beyond the float ceiling
        m = make_model({"kind": "ExtremeSparse"})
        assert expected_nodes_exact(m, 100.0) == pytest.approx(
            3636.8, abs=0.5)

    def test_asymptote_trend(self):
        for config in ({"kind": "SeparablePower", "sigma": 0.5},
                       {"kind": "NonSeparablePower", "sigma": 0.5},
                       {"kind": "GGP", "sigma0": 0.5, "tau0": 1.0}):
            m = make_model(config)
            gaps = []
            for alpha in (1e2, 1e3, 1e4):
                exact = expected_nodes_exact(m, alpha)
                asym = asymptotic_node_count(m, alpha)
                gaps.append(abs(exact / asym - 1.0))
            assert gaps[0] >= gaps[1] >= gaps[2], config
            assert gaps[2] <= 0.10, config


class TestExpectedDegreeCounts:
    def test_fraction_limits(self):
        m = make_model({"kind": "SeparablePower", "sigma": 0.5})
        n = expected_nodes_exact(m, 1e3)
        n1 = expected_degree_count_exact(m, 1e3, 1)
        n2 = expected_degree_count_exact(m, 1e3, 2)
        assert abs(n1 / n - 0.5) <= 0.05 * 0.5 / 0.5   # within 5% of 0.5
        assert abs(n2 / n - 0.125) <= 0.10 * 0.125 / 0.125

    def test_partition_bound(self):
        # degree counts up to 50 cannot exceed the node count
        for config in ({"kind": "DenseCompact"}, {"kind": "Exponential"},
                       {"kind": "SeparablePower", "sigma": 0.5},
                       {"kind": "ExtremeSparse"},
                       {"kind": "GGP", "sigma0": 0.5, "tau0": 1.0}):
            m = make_model(config)
            total = sum(expected_degree_count_exact(m, 100.0, j)
                        for j in range(1, 51))
            assert total <= expected_nodes_exact(m, 100.0) * (1.0 + 1e-6), \
                config

    def test_vanishes_at_small_alpha(self):
        m = make_model({"kind": "Exponential"})
        assert expected_degree_count_exact(m, 1e-6, 1) < 1e-4

    def test_rejects_bad_args(self):
        m = make_model({"kind": "Exponential"})
        with pytest.raises(ValueError):
            expected_degree_count_exact(m, 10.0, 0)
        with pytest.raises(ValueError):
            expected_degree_count_exact(m, -1.0, 1)


class TestDegreeFractionFormula:
    def test_values(self):
        assert asymptotic_degree_fraction(0.5, 1) == pytest.approx(0.5)
        assert asymptotic_degree_fraction(0.5, 3) == pytest.approx(
            0.5 * math.gamma(2.5) / (6.0 * math.gamma(0.5)), rel=1e-12)
        assert asymptotic_degree_fraction(0.5, 3) == pytest.approx(0.0625)
        assert asymptotic_degree_fraction(0.0, 1) == 0.0

    def test_sigma_one_error(self):
        with pytest.raises(SigmaOneFractionError):
            asymptotic_degree_fraction(1.0, 1)

    def test_sums_to_one(self):
        # partial sums approach 1 with remainder ~ J^{-sigma}/Gamma(1-sigma)
        # (slow for small sigma), so compare against the analytic tail
        j_max = 400
        for sigma in (0.2, 0.5, 0.8):
            fr = [asymptotic_degree_fraction(sigma, j)
                  for j in range(1, j_max)]
            partial = np.cumsum(fr)
            assert np.all(np.diff(partial) > 0)
            assert partial[-1] <= 1.0
            tail = j_max ** -sigma / math.gamma(1.0 - sigma)
            assert 1.0 - partial[-1] == pytest.approx(tail, rel=0.05)

    def test_power_law_tail(self):
        # fractions ~ sigma / (Gamma(1-sigma) j^{1+sigma}) for large j
        sigma = 0.5
        j = 100
        frac = asymptotic_degree_fraction(sigma, j)
        tail = sigma / (math.gamma(1.0 - sigma) * j ** (1.0 + sigma))
        assert abs(frac / tail - 1.0) <= 0.05


class TestEdgesFromNodes:
    def test_closed_forms(self):
        n = 5000.0
        m = make_model({"kind": "Exponential"})
        assert edges_from_nodes_prediction(m, n) == pytest.approx(
            0.5 * n * n / math.log(n) ** 2, rel=1e-9)
        m = make_model({"kind": "ExtremeSparse"})
        assert edges_from_nodes_prediction(m, n) == pytest.approx(
            0.25 * n * math.log(n), rel=1e-9)
        m = make_model({"kind": "DenseCompact"})
        assert edges_from_nodes_prediction(m, n) == pytest.approx(
            n * n / 8.0, rel=1e-9)

    def test_rejects_tiny_graphs(self):
        m = make_model({"kind": "Exponential"})
        with pytest.raises(ValueError):
            edges_from_nodes_prediction(m, 1.0)


class TestTauberian:
    def test_separable_power(self):
        m = make_model({"kind": "SeparablePower", "sigma": 0.5})
        assert abs(tauberian_ratio(m, 1e6) - 1.0) <= 0.02

    def test_exponential(self):
        # ratio carries the Euler-Mascheroni additive offset gamma/log t
        m = make_model({"kind": "Exponential"})
        ratio = tauberian_ratio(m, 1e6)
        assert abs(ratio - 1.0) <= 0.05
        assert ratio == pytest.approx(1.0 + 0.5772156649 / math.log(1e6),
                                      abs=5e-3)

    def test_extreme_sparse_reference_value(self):
        """The sigma = 1 ratio converges only loglog/log slowly.

        Frozen high-precision reference: g0(1e8) / (1e8/log 1e8) =
        1.35301 (the correction ~ 2 loglog t / log t drops below 10% only
        past t ~ 1e40).  The quadrature must reproduce the true value, not
        a truncation artifact.
        """
        m = make_model({"kind": "ExtremeSparse"})
        assert tauberian_ratio(m, 1e8) == pytest.approx(1.35301, abs=2e-3)

    def test_extreme_sparse_trend(self):
        m = make_model({"kind": "ExtremeSparse"})
        r1 = tauberian_ratio(m, 1e8)
        r2 = tauberian_ratio(m, 1e12)
        assert r1 > r2 > 1.0

    def test_defaults_table_is_honest(self):
        for config in ({"kind": "DenseCompact"}, {"kind": "Exponential"},
                       {"kind": "SeparablePower", "sigma": 0.2},
                       {"kind": "SeparablePower", "sigma": 0.8},
                       {"kind": "NonSeparablePower", "sigma": 0.5},
                       {"kind": "ExtremeSparse"},
                       {"kind": "GGP", "sigma0": 0.5, "tau0": 1.0},
                       {"kind": "GGP", "sigma0": 0.0, "tau0": 1.0},
                       {"kind": "GGP", "sigma0": -0.5, "tau0": 1.0}):
            m = make_model(config)
            t, tol = tauberian_defaults(m)
            assert abs(tauberian_ratio(m, t) - 1.0) <= tol, config


class TestNuAndMargin:
    def test_separable_factorization(self):
        # separable kernel W = g(x)g(y): nu(x,y) = g(x) g(y) int g^2,
        # i.e. mu(x) mu(y) (int g^2) / W_bar.  Here g = (1+x)^{-2}, so
        # int g^2 = int (1+x)^{-4} = 1/3 and W_bar = 1.
        m = make_model({"kind": "SeparablePower", "sigma": 0.5})
        int_g_sq = 1.0 / 3.0
        for x, y in ((0.0, 1.0), (0.5, 2.0), (3.0, 3.0)):
            expect = (m.mean_degree(x) * m.mean_degree(y)
                      * int_g_sq / m.total_mass())
            assert nu(m, x, y) == pytest.approx(expect, rel=1e-6)

    def test_cauchy_schwarz(self):
        for config in ({"kind": "Exponential"},
                       {"kind": "NonSeparablePower", "sigma": 0.5}):
            m = make_model(config)
            for x, y in ((0.1, 0.7), (1.0, 2.5), (4.0, 0.2)):
                bound = math.sqrt(nu(m, x, x) * nu(m, y, y))
                assert nu(m, x, y) <= bound * (1.0 + 1e-9)

    def test_nonseparable_margin(self):
        # W(x,y) <= sigma^{-1-sigma} mu(x)^a mu(y)^a with a = (1+sigma)/2
        sigma = 0.5
        m = make_model({"kind": "NonSeparablePower", "sigma": sigma})
        grid = [(x, y) for x in (0.5, 1.0, 3.0, 8.0)
                for y in (0.5, 1.0, 3.0, 8.0)]
        report = assumption2_margin(m, a=(1.0 + sigma) / 2.0,
                                    c1=sigma ** (-1.0 - sigma), grid=grid)
        assert report["ok"]
        assert report["max_ratio"] <= sigma ** (-1.0 - sigma)
        assert len(report["points"]) == len(grid)

    def test_rejects_bad_exponent(self):
        m = make_model({"kind": "Exponential"})
        with pytest.raises(ValueError):
            assumption2_margin(m, a=0.4, c1=1.0, grid=[(1.0, 1.0)])


class TestOracleReport:
    def test_values_and_io(self, tmp_path):
        m = make_model({"kind": "SeparablePower", "sigma": 0.5})
        ov = oracle_values(m, 100.0)
        assert ov.e_edges_exact == pytest.approx(
            expected_edges_exact(m, 100.0))
        assert ov.e_nodes_exact > 0
        assert all(v >= 0 for v in ov.e_degree_exact.values())
        assert sum(ov.e_degree_exact.values()) <= ov.e_nodes_exact

        path = str(tmp_path / "oracle.json")
        write_oracle_report(m, [100.0], path)
        with open(path) as fh:
            data = json.load(fh)
        assert data["model"]["kind"] == "SeparablePower"
        blocks = data["oracles"]
        assert blocks[0]["alpha"] == 100.0
        assert blocks[0]["e_edges_exact"] == pytest.approx(ov.e_edges_exact)
