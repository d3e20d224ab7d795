"""Command-line front end.

Subcommands: sample, spectra, taxonomy, classify, events, lo, campaign.
All structured output is JSON on stdout; campaign writes CSV + JSONL files
and exits 2 when a confirmed red counterexample event was recorded.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import anticoncentration, graph_events, harness, sampler, spectra, taxonomy
from .core import from_json_dict


def _load_matrix(path):
    with open(path) as fh:
        return from_json_dict(json.load(fh))


def _load_vector(path) -> np.ndarray:
    with open(path) as fh:
        obj = json.load(fh)
    coords = obj["coords"] if isinstance(obj, dict) else obj
    return np.array([complex(p[0], p[1]) if isinstance(p, list) else complex(p)
                     for p in coords], dtype=np.complex128)


def _cmd_sample(args) -> int:
    burn = args.burn_in if args.burn_in is not None else sampler.default_burn_in(args.n, args.d)
    out = []
    for k in range(args.count):
        seed = sampler.derive_seed(args.seed, k) if args.count > 1 else args.seed
        out.append(sampler.sample(args.n, args.d, burn, seed).to_json_dict())
    text = json.dumps(out, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_spectra(args) -> int:
    M = _load_matrix(args.infile)
    method = "dense" if args.dense else ("iterative" if args.iterative else None)
    rep = spectra.singular_extremes(M, complex(args.shift_re, args.shift_im), method=method)
    print(json.dumps(rep.to_json_dict(), sort_keys=True))
    return 0


def _cmd_taxonomy(args) -> int:
    params = taxonomy.compute_params(args.n, args.d, args.a1, args.a2, args.a3)
    print(json.dumps(params.to_json_dict(), sort_keys=True))
    return 0


def _cmd_classify(args) -> int:
    with open(args.params) as fh:
        pj = json.load(fh)
    params = taxonomy.compute_params(pj["n"], pj["d"], pj["a1"], pj["a2"], pj["a3"])
    x = _load_vector(args.vector)
    cls = taxonomy.classify(x, params, delta=args.delta)
    print(json.dumps(cls.to_json_dict(), sort_keys=True))
    return 0


def _cmd_events(args) -> int:
    M = _load_matrix(args.infile)
    if args.check == "omega-k-eps":
        mode = "exact" if args.exact or args.trials is None else "sampled"
        rep = graph_events.check_omega_k_eps(M, k=args.k, eps=args.eps, mode=mode,
                                             trials=args.trials or 1000, seed=args.seed)
    elif args.check == "omega1":
        rep = graph_events.check_omega1(M, eps=args.eps)
    elif args.check == "zero-minor":
        mode = "exact" if args.exact else "greedy"
        rep = graph_events.find_zero_minor(M, alpha=args.alpha, beta=args.beta, mode=mode)
    else:
        raise SystemExit(f"unknown check {args.check!r}")
    print(json.dumps(rep.to_json_dict(), sort_keys=True))
    return 0


def _cmd_lo(args) -> int:
    if args.x:
        x = _load_vector(args.x)
    else:
        x = np.ones(args.m, dtype=np.complex128)
    q = anticoncentration.LOQuery(x=tuple(x), t=args.t)
    if args.mc is not None:
        est, se = anticoncentration.lo_ball_mc(q, samples=args.mc, seed=args.seed)
        print(json.dumps({"estimate": est, "stderr": se, "mode": "mc"}, sort_keys=True))
    else:
        p = anticoncentration.lo_ball_exact(q)
        print(json.dumps({"probability": p, "ratio": anticoncentration.lo_bound_ratio(q, p),
                          "mode": "exact"}, sort_keys=True))
    return 0


def _cmd_campaign(args) -> int:
    with open(args.config) as fh:
        cfg = harness.ExperimentConfig.from_json_dict(json.load(fh))
    records, summary = harness.run_campaign(cfg)
    harness.write_csv(records, args.out)
    harness.write_records_jsonl(records, args.records)
    print(json.dumps(summary, sort_keys=True))
    return 2 if summary["red_events"] else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="regdigraph")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="sample d-regular matrices")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--burn-in", type=int, default=None)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--out", default=None)
    s.set_defaults(func=_cmd_sample)

    s = sub.add_parser("spectra", help="extreme singular values of M - z Id")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--shift-re", type=float, default=0.0)
    s.add_argument("--shift-im", type=float, default=0.0)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--dense", action="store_true")
    g.add_argument("--iterative", action="store_true")
    s.set_defaults(func=_cmd_spectra)

    s = sub.add_parser("taxonomy", help="derived parameter bundle")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--a1", type=float, default=0.1)
    s.add_argument("--a2", type=float, default=None)
    s.add_argument("--a3", type=float, default=None)
    s.set_defaults(func=_cmd_taxonomy)

    s = sub.add_parser("classify", help="classify a vector against parameters")
    s.add_argument("--params", required=True)
    s.add_argument("--vector", required=True)
    s.add_argument("--delta", type=float, default=None)
    s.set_defaults(func=_cmd_classify)

    s = sub.add_parser("events", help="event checkers")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--check", required=True,
                   choices=["omega-k-eps", "omega1", "zero-minor"])
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--eps", type=float, default=None)
    s.add_argument("--alpha", type=float, default=None)
    s.add_argument("--beta", type=float, default=None)
    s.add_argument("--exact", action="store_true")
    s.add_argument("--greedy", action="store_true")
    s.add_argument("--trials", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=_cmd_events)

    s = sub.add_parser("lo", help="Littlewood-Offord ball probability")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--x", default=None, help="JSON vector file; default all-ones")
    s.add_argument("--exact", action="store_true")
    s.add_argument("--mc", type=int, default=None, help="Monte Carlo sample count")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=_cmd_lo)

    s = sub.add_parser("campaign", help="run a Monte Carlo campaign from a config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True, help="CSV output path")
    s.add_argument("--records", required=True, help="JSONL records path")
    s.set_defaults(func=_cmd_campaign)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
