"""
Command-line front end.

    cel table1     --n 8,16 --family mds,binary-random --out table.csv
    cel rate-sweep --n 1024,2048 --family mds,polar-sc --out sweep.csv
    cel find-rate  --mu 1
    cel simulate   --family mds --n 8 --k 6 --trials 1000000 --seed 42

Options may also come from a key=value config file (--config); explicit
flags win.  CEL_SEED in the environment supplies the default seed.
Exit codes: 0 ok, 2 bad input, 3 quadrature failed to converge,
4 infeasible (rank-deficient) code.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .construct import build_polar, build_reed_muller_like, sample_random_full_rank
from .erasure import pe_polar_sc
from .exectime import (QuadratureError, StragglerModel, mds_t_avg_all_k,
                       polar_sc_t_avg_all_k, reports_to_csv, reports_to_jsonl,
                       solve_optimal_rate, t_avg_from_profile, t_avg_mds,
                       t_avg_uncoded)
from .reports import (ALL_FAMILIES, SWEEP_N_LIST, TABLE1_N_LIST, mc_t_avg,
                      rate_sweep_rows, sweep_rows_to_csv, table1_rows)
from .sim import InfeasibleCode, run_simulation

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_INFEASIBLE = 4


def _parse_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw.rstrip()}")
            key, val = line.split("=", 1)
            values[key.strip()] = val.strip()
    return values


def _resolve(args, config: dict[str, str], key: str, cast, default):
    """Flag value if given, else config file, else default."""
    flag_val = getattr(args, key.replace("-", "_"), None)
    if flag_val is not None:
        return flag_val
    if key in config:
        return cast(config[key])
    return default


def _csv_ints(text: str) -> list[int]:
    return [int(x) for x in str(text).split(",") if x.strip()]


def _csv_strs(text: str) -> list[str]:
    return [x.strip() for x in str(text).split(",") if x.strip()]


def _default_seed() -> int:
    return int(os.environ.get("CEL_SEED", "0"))


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--n", type=_csv_ints, default=None,
                   help="comma-separated cluster sizes")
    p.add_argument("--family", type=_csv_strs, default=None,
                   help=f"comma-separated families from {','.join(ALL_FAMILIES)}")
    p.add_argument("--mu", type=float, default=None, help="straggling rate")
    p.add_argument("--trials", type=int, default=None,
                   help="Monte-Carlo trials (per stratum for profiles)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--design-eps", default=None,
                   help="polar design erasure probability, or 'auto'")
    p.add_argument("--rate", type=float, default=None, help="fixed encoding rate")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], default=None)
    p.add_argument("--config", default=None, help="key=value config file")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cel",
                                 description="coded distributed computing performance lab")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("table1", "per-family execution-time table with optimal k"),
        ("rate-sweep", "scaled execution time at a fixed encoding rate"),
        ("simulate", "stochastic simulation vs the analytic mean"),
    ]:
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        if name == "simulate":
            p.add_argument("--k", type=int, default=None, help="tasks per job")
            p.add_argument("--dump", default=None,
                           help="write per-trial times as little-endian float64")
    p = sub.add_parser("find-rate", help="asymptotically optimal encoding rate")
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--config", default=None)
    return ap


def _cmd_table1(args, config) -> int:
    n_list = _resolve(args, config, "n", _csv_ints, list(TABLE1_N_LIST))
    families = _resolve(args, config, "family", _csv_strs, list(ALL_FAMILIES))
    mu = _resolve(args, config, "mu", float, 1.0)
    trials = _resolve(args, config, "trials", int, 10_000)
    seed = _resolve(args, config, "seed", int, _default_seed())
    eps_d = _resolve(args, config, "design-eps", str, "auto")
    eps_d = 0.1 if eps_d == "auto" else float(eps_d)
    fmt = _resolve(args, config, "format", str, "csv")
    rows = table1_rows(n_list, families, mu, trials, seed, eps_d)
    text = reports_to_csv(rows) if fmt == "csv" else reports_to_jsonl(rows)
    _emit(text, _resolve(args, config, "out", str, None))
    return EXIT_OK


def _cmd_rate_sweep(args, config) -> int:
    n_list = _resolve(args, config, "n", _csv_ints, list(SWEEP_N_LIST))
    families = _resolve(args, config, "family", _csv_strs,
                        ["mds", "binary-random", "polar-sc"])
    mu = _resolve(args, config, "mu", float, 1.0)
    trials = _resolve(args, config, "trials", int, 10_000)
    seed = _resolve(args, config, "seed", int, _default_seed())
    rate = _resolve(args, config, "rate", float, None)
    eps_d = _resolve(args, config, "design-eps", str, "auto")
    fmt = _resolve(args, config, "format", str, "csv")
    rows = rate_sweep_rows(n_list, families, mu, rate, trials, seed, eps_d)
    if fmt == "csv":
        text = sweep_rows_to_csv(rows)
    else:
        text = "\n".join(json.dumps({
            "family": r.family, "decoder": r.decoder, "n": r.n, "k": r.k,
            "mu": r.mu, "nt_avg": r.n * r.t_avg, "method": r.method,
            "std_err": None if r.std_err is None else r.n * r.std_err,
        }) for r in rows) + "\n"
    _emit(text, _resolve(args, config, "out", str, None))
    return EXIT_OK


def _cmd_find_rate(args, config) -> int:
    mu = _resolve(args, config, "mu", float, 1.0)
    r = solve_optimal_rate(mu)
    residual = (1 - r) * np.log(1 - r) - mu * (1 - r) + r
    print(f"R* = {r:.6f}")
    print(f"residual = {residual:.3e}")
    return EXIT_OK


def _analytic_t(family: str, n: int, k: int, mu: float, eps_d: float,
                trials: int, seed: int) -> float:
    model = StragglerModel(mu=mu, n=n, k=k)
    if family in {"uncoded", "mds"}:
        return t_avg_mds(model)
    if family == "binary-random":
        from .erasure import random_ensemble_profile
        return t_avg_from_profile(model, random_ensemble_profile(n, k))
    if family == "polar-sc":
        return float(polar_sc_t_avg_all_k(n, eps_d, mu)[k - 1])
    if family in {"polar-ml", "rm-ml"}:
        return mc_t_avg(family, n, k, mu, trials, seed, eps_d)[0]
    raise ValueError(f"unknown family {family!r}")


def _cmd_simulate(args, config) -> int:
    n_list = _resolve(args, config, "n", _csv_ints, None)
    families = _resolve(args, config, "family", _csv_strs, None)
    if not n_list or len(n_list) != 1 or not families or len(families) != 1:
        raise ValueError("simulate needs exactly one --n and one --family")
    n, family = n_list[0], families[0]
    mu = _resolve(args, config, "mu", float, 1.0)
    trials = _resolve(args, config, "trials", int, 100_000)
    seed = _resolve(args, config, "seed", int, _default_seed())
    eps_d = _resolve(args, config, "design-eps", str, "auto")
    eps_d = 0.1 if eps_d == "auto" else float(eps_d)
    k = _resolve(args, config, "k", int, None)
    if family == "uncoded":
        k = n if k is None else k
        if k != n:
            raise ValueError("uncoded requires k = n")
    if k is None:
        raise ValueError("simulate needs --k")
    model = StragglerModel(mu=mu, n=n, k=k)

    decoder = "ml"
    info_set = None
    if family in {"uncoded", "mds"}:
        code = "mds"
    elif family == "binary-random":
        code = sample_random_full_rank(n, k, np.random.default_rng(
            np.random.SeedSequence([seed, n, k])))
    elif family == "polar-sc":
        code, profile = build_polar(n, k, eps_d)
        decoder, info_set = "sc", profile.info_set
    elif family == "polar-ml":
        code = build_polar(n, k, eps_d)[0]
    elif family == "rm-ml":
        code = build_reed_muller_like(n, k)
    else:
        raise ValueError(f"unknown family {family!r}")

    run = run_simulation(model, code, decoder, trials, seed, info_set=info_set,
                         dump_path=_resolve(args, config, "dump", str, None))
    analytic = _analytic_t(family, n, k, mu, eps_d,
                           _resolve(args, config, "trials", int, 10_000), seed)
    z = None
    if run.std_err:
        z = (run.mean_t - analytic) / run.std_err
    payload = json.loads(run.to_json())
    payload.update({"family": family, "analytic_t_avg": analytic, "z_score": z})
    _emit(json.dumps(payload, indent=2) + "\n",
          _resolve(args, config, "out", str, None))
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _parse_config(args.config) if getattr(args, "config", None) else {}
        if args.command == "table1":
            return _cmd_table1(args, config)
        if args.command == "rate-sweep":
            return _cmd_rate_sweep(args, config)
        if args.command == "find-rate":
            return _cmd_find_rate(args, config)
        return _cmd_simulate(args, config)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QuadratureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InfeasibleCode as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
