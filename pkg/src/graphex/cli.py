"""Command-line front end: sample graphs, run sweeps, verify laws.

Exit codes: 0 ok, 1 configuration error, 2 resource cap exceeded,
3 I/O error, 4 verification failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import asymptotics, localglobal, sampler, stats
from .graphon import Kind, ValidationError, make_model
from .localglobal import (SparseSbmModel, block_link_matrix,
                          lg_expected_nodes, sample_lg_graph)
from .rng import mix64
from .sampler import ResourceCapError
from .stats import SweepResult, stats_row, summarize

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RESOURCE = 2
EXIT_IO = 3
EXIT_VERIFY = 4

MAX_DEGREE_COL = 6


def load_model(path: str):
    try:
        with open(path) as fh:
            raw = fh.read()
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot read model config: {exc}")
    try:
        config = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise _CliError(EXIT_CONFIG, f"malformed model JSON: {exc}")
    try:
        return make_model(config)
    except (ValidationError, TypeError) as exc:
        raise _CliError(EXIT_CONFIG, f"invalid model config: {exc}")


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _sample_any(model, alpha: float, seed: int, delta: float, fast: bool):
    if isinstance(model, SparseSbmModel):
        return sample_lg_graph(model, alpha, seed, delta)
    method = "fast" if fast else "auto"
    return sampler.sample_graph(model, alpha, seed, delta, method=method)


def cmd_sample(args) -> int:
    model = load_model(args.model)
    try:
        graph = _sample_any(model, args.alpha, args.seed, args.delta,
                            args.fast)
    except ResourceCapError as exc:
        raise _CliError(EXIT_RESOURCE, str(exc))
    out = args.out
    try:
        os.makedirs(out, exist_ok=True)
        node_path = os.path.join(out, "nodes.csv")
        edge_path = os.path.join(out, "edges.csv")
        if isinstance(model, SparseSbmModel):
            with open(node_path, "w") as fh:
                fh.write("id,theta,vartheta,v,block\n")
                for k in range(graph.n_nodes):
                    fh.write(f"{k},{float(graph.node_theta[k])!r},"
                             f"{float(graph.node_vartheta[k])!r},"
                             f"{float(graph.node_v[k])!r},"
                             f"{int(graph.node_block[k])}\n")
            with open(edge_path, "w") as fh:
                fh.write("i,j\n")
                for i, j in zip(graph.edge_i, graph.edge_j):
                    fh.write(f"{i},{j}\n")
        else:
            sampler.write_graph_csv(graph, node_path, edge_path)
            sampler.write_graph_json(graph, os.path.join(out, "graph.json"))
        stats.write_stats_json(summarize(graph),
                               os.path.join(out, "stats.json"))
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot write outputs: {exc}")
    return EXIT_OK


def _replicate_row(config: dict, alpha: float, alpha_idx: int, rep: int,
                   master_seed: int, delta: float, fast: bool):
    model = make_model(config)
    seed = mix64(master_seed, alpha_idx, rep)
    graph = _sample_any(model, alpha, seed, delta, fast)
    return stats_row(graph, alpha, rep, seed, MAX_DEGREE_COL)


def _sweep_rows(config: dict, alphas, reps: int, master_seed: int,
                delta: float, fast: bool, jobs: int):
    tasks = [(ai, alpha, rep) for ai, alpha in enumerate(alphas)
             for rep in range(reps)]
    if jobs <= 1:
        return [_replicate_row(config, alpha, ai, rep, master_seed, delta,
                               fast) for ai, alpha, rep in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_replicate_row, config, alpha, ai, rep,
                               master_seed, delta, fast)
                   for ai, alpha, rep in tasks]
        return [f.result() for f in futures]


def _write_sweep_csv(path: str, rows, config: dict, master_seed: int,
                     delta: float):
    digest = hashlib.sha256(
        json.dumps(config, sort_keys=True).encode()).hexdigest()[:16]
    deg_cols = ",".join(f"deg{j}" for j in range(1, MAX_DEGREE_COL + 1))
    with open(path, "w") as fh:
        fh.write(f"# model_digest={digest}\n")
        fh.write(f"# master_seed={master_seed}\n")
        fh.write(f"# delta={delta!r}\n")
        fh.write(f"# timestamp={time.strftime('%Y-%m-%dT%H:%M:%S')}\n")
        fh.write("alpha,replicate,seed,n_latent,n_nodes,n_edges,"
                 f"n_self_loops,{deg_cols},sigma_hat\n")
        for r in rows:
            degs = ",".join(str(c) for c in r.degree_counts)
            sh = "" if r.sigma_hat is None else repr(r.sigma_hat)
            fh.write(f"{r.alpha!r},{r.replicate},{r.seed},{r.n_latent},"
                     f"{r.n_nodes},{r.n_edges},{r.n_self_loops},{degs},"
                     f"{sh}\n")


def cmd_sweep(args) -> int:
    try:
        with open(args.model) as fh:
            config = json.load(fh)
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot read model config: {exc}")
    except json.JSONDecodeError as exc:
        raise _CliError(EXIT_CONFIG, f"malformed model JSON: {exc}")
    if isinstance(config, dict) and config.get("kind") == "LocalGlobal":
        pass  # handled inside make_model
    try:
        make_model(config)  # validate before spawning work
    except ValidationError as exc:
        raise _CliError(EXIT_CONFIG, f"invalid model config: {exc}")
    alphas = args.alphas
    if not alphas:
        raise _CliError(EXIT_CONFIG, "empty alpha grid")
    if args.reps < 1:
        raise _CliError(EXIT_CONFIG, "replicates must be >= 1")
    try:
        rows = _sweep_rows(config, alphas, args.reps, args.seed, args.delta,
                           args.fast, args.jobs)
    except ResourceCapError as exc:
        raise _CliError(EXIT_RESOURCE, str(exc))
    try:
        _write_sweep_csv(args.out, rows, config, args.seed, args.delta)
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot write sweep CSV: {exc}")
    return EXIT_OK


def _check(name, ok, measured, expected, tol_note):
    return {"name": name, "pass": bool(ok), "measured": measured,
            "expected": expected, "tolerance": tol_note}


def _verify_plain(model, reps: int, alpha: float, delta: float):
    """Moment checks against the exact oracles for a single-kernel model."""
    checks = []
    n_edges, n_nodes, deg1_fracs = [], [], []
    for rep in range(reps):
        seed = mix64(20_2400, 0, rep)
        g = sampler.sample_graph(model, alpha, seed, delta, method="auto")
        st = summarize(g)
        n_edges.append(st.n_edges)
        n_nodes.append(st.n_nodes)
        if st.n_nodes:
            deg1_fracs.append(st.degree_hist.get(1, 0) / st.n_nodes)

    e_exact = asymptotics.expected_edges_exact(model, alpha)
    mean_e = float(np.mean(n_edges))
    se_e = float(np.std(n_edges, ddof=1) / np.sqrt(reps))
    checks.append(_check("edge_law", abs(mean_e - e_exact) <= 4.0 * se_e,
                         mean_e, e_exact, f"4 SE = {4.0 * se_e:.3g}"))

    n_exact = asymptotics.expected_nodes_exact(model, alpha)
    mean_n = float(np.mean(n_nodes))
    se_n = float(np.std(n_nodes, ddof=1) / np.sqrt(reps))
    checks.append(_check("node_law", abs(mean_n - n_exact) <= 4.0 * se_n,
                         mean_n, n_exact, f"4 SE = {4.0 * se_n:.3g}"))

    prof = model.tail_profile()
    if 0.0 < prof.sigma < 1.0:
        limit = asymptotics.asymptotic_degree_fraction(prof.sigma, 1)
        e1 = asymptotics.expected_degree_count_exact(model, alpha, 1)
        oracle_frac = e1 / n_exact
        mean_f = float(np.mean(deg1_fracs))
        checks.append(_check(
            "degree1_fraction", abs(mean_f - oracle_frac) <= 0.05,
            mean_f, {"finite_alpha_oracle": oracle_frac, "limit": limit},
            "0.05 absolute vs finite-alpha oracle"))

    t_probe, tol = asymptotics.tauberian_defaults(model)
    ratio = asymptotics.tauberian_ratio(model, t_probe)
    checks.append(_check("tauberian_ratio", abs(ratio - 1.0) <= tol,
                         ratio, 1.0, f"{tol:.0%} at t={t_probe:g}"))
    return checks


def _verify_lg(model: SparseSbmModel, reps: int, alpha: float, delta: float):
    checks = []
    n_nodes = []
    for rep in range(reps):
        seed = mix64(20_2400, 1, rep)
        g = sample_lg_graph(model, alpha, seed, delta)
        n_nodes.append(g.n_nodes)
    n_exact = lg_expected_nodes(model, alpha)
    mean_n = float(np.mean(n_nodes))
    se_n = float(np.std(n_nodes, ddof=1) / np.sqrt(reps))
    checks.append(_check("lg_node_law", abs(mean_n - n_exact) <= 4.0 * se_n,
                         mean_n, n_exact, f"4 SE = {4.0 * se_n:.3g}"))
    g = sample_lg_graph(model, max(alpha, 100.0), mix64(20_2400, 2, 0),
                        delta)
    est = block_link_matrix(g)
    err = float(np.nanmax(np.abs(est - model.b)))
    checks.append(_check("block_link_matrix", err <= 0.25,
                         est.tolist(), model.b.tolist(),
                         "max abs entry error 0.25 (single replicate)"))
    return checks


def cmd_verify(args) -> int:
    model = load_model(args.model)
    try:
        if isinstance(model, SparseSbmModel):
            checks = _verify_lg(model, args.reps, args.alpha, args.delta)
        else:
            checks = _verify_plain(model, args.reps, args.alpha, args.delta)
    except ResourceCapError as exc:
        raise _CliError(EXIT_RESOURCE, str(exc))
    report = {"model": model.config(), "alpha": args.alpha,
              "replicates": args.reps,
              "checks": checks, "all_pass": all(c["pass"] for c in checks)}
    try:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2)
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot write report: {exc}")
    return EXIT_OK if report["all_pass"] else EXIT_VERIFY


def _parse_alpha_list(text: str):
    try:
        return [float(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alpha list: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="graphex",
        description="Sample and verify sparse graphs built on exchangeable "
                    "point processes")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", help="sample one graph and write it out")
    sp.add_argument("--model", required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--delta", type=float, default=1e-3)
    sp.add_argument("--out", required=True)
    sp.add_argument("--fast", action="store_true",
                    help="force the accelerated sampler")
    sp.set_defaults(func=cmd_sample)

    sw = sub.add_parser("sweep", help="run an (alpha x replicate) sweep")
    sw.add_argument("--model", required=True)
    sw.add_argument("--alphas", type=_parse_alpha_list, required=True)
    sw.add_argument("--reps", type=int, required=True)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--delta", type=float, default=1e-3)
    sw.add_argument("--out", required=True)
    sw.add_argument("--fast", action="store_true")
    sw.add_argument("--jobs", type=int, default=1,
                    help="parallel replicate workers (results are "
                         "scheduling-independent)")
    sw.set_defaults(func=cmd_sweep)

    vf = sub.add_parser("verify", help="check the model against its oracles")
    vf.add_argument("--model", required=True)
    vf.add_argument("--alpha", type=float, default=40.0)
    vf.add_argument("--reps", type=int, default=60)
    vf.add_argument("--delta", type=float, default=1e-3)
    vf.add_argument("--out", required=True)
    vf.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
