"""Monte Carlo campaign runner: sampler -> spectra -> taxonomy -> events.

A campaign iterates over the (n, d, z) grid; each trial samples a matrix
with its own derived seed, computes the extreme singular values, classifies
the minimizing vector (and, by default, the adjoint minimizer -- the
taxonomy applies to matrices and their conjugates symmetrically), runs the
requested event checks, and compares s_min against the n^-6 probe and the
piecewise regime shapes.

A trial with s_min < n^-6 while the probe hypotheses hold (|z| <= d/6 and
d inside the (1, n/(log n * log log n)) window, constants-as-one convention)
is a red event: it is re-checked in high-precision arithmetic and counts as
a counterexample only if confirmed.  Summaries report the empirical success
fraction; no theorem-level pass/fail is declared because the probability
constants are unspecified.

Determinism: trial i depends only on (config, i); records are emitted in
trial order, so JSONL output is byte-identical for any worker count.  The
worker count comes from the REGDIGRAPH_THREADS environment variable only.
"""

from __future__ import annotations

import csv
import json
import math
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import graph_events, taxonomy
from .core import RegularMatrix
from .sampler import default_burn_in, derive_seed, sample, uniformity_chi_square
from .spectra import (
    SpectralReport,
    is_singular_exact,
    numerically_singular,
    singular_extremes,
    smin_below_threshold_highprec,
)

CSV_COLUMNS = ["trial", "seed", "n", "d", "z_re", "z_im", "s_min", "s_max",
               "v_class", "bound_n6", "remark33_regime", "remark33_ratio",
               "events_json"]

EXACT_SINGULARITY_CAP = 24


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


@dataclass
class ExperimentConfig:
    """Campaign grid and knobs; see README for the JSON schema."""

    n: object                     # int or list of ints
    d: object                     # int or list of ints
    z: list                       # list of complex shifts
    trials: int                   # per (n, d, z) cell
    master_seed: int
    burn_in: Optional[int] = None          # None -> 20*n*d per cell
    a1: float = 0.1
    a2: Optional[float] = None
    a3: Optional[float] = None
    checks: list = field(default_factory=list)   # e.g. [{"check": "omega1", "eps": 0.25}]
    include_adjoint: bool = True
    thresholds: dict = field(default_factory=dict)

    def cells(self):
        for n in _as_list(self.n):
            for d in _as_list(self.d):
                for z in self.z:
                    yield int(n), int(d), complex(z)

    def cell_burn_in(self, n: int, d: int) -> int:
        return self.burn_in if self.burn_in is not None else default_burn_in(n, d)

    def shift_range_flags(self) -> list[dict]:
        """Cells whose shift leaves the |z| <= d/6 window of the n^-6 probe."""
        return [{"n": n, "d": d, "z": [z.real, z.imag]}
                for n, d, z in self.cells() if abs(z) > d / 6.0]

    def to_json_dict(self) -> dict:
        return {
            "n": self.n, "d": self.d, "z": [[z.real, z.imag] for z in map(complex, self.z)],
            "trials": self.trials, "master_seed": self.master_seed,
            "burn_in": self.burn_in, "a1": self.a1, "a2": self.a2, "a3": self.a3,
            "checks": self.checks, "include_adjoint": self.include_adjoint,
            "thresholds": self.thresholds,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ExperimentConfig":
        z = [complex(p[0], p[1]) if isinstance(p, (list, tuple)) else complex(p)
             for p in obj["z"]]
        return cls(
            n=obj["n"], d=obj["d"], z=z, trials=int(obj["trials"]),
            master_seed=int(obj["master_seed"]), burn_in=obj.get("burn_in"),
            a1=obj.get("a1", 0.1), a2=obj.get("a2"), a3=obj.get("a3"),
            checks=obj.get("checks", []),
            include_adjoint=obj.get("include_adjoint", True),
            thresholds=obj.get("thresholds", {}))


def theorem_range_holds(n: int, d: int, z: complex) -> bool:
    """|z| <= d/6 and 1 < d < n/((log n)(log log n)), constants-as-one."""
    if abs(z) > d / 6.0 + 1e-12:
        return False
    if n <= 3 or d <= 1:
        return False
    ll = math.log(math.log(n))
    if ll <= 0:
        return False
    return d < n / (math.log(n) * ll)


def remark_regime_shape(n: int, d: int) -> tuple[str, Optional[float]]:
    """Piecewise lower-bound shape for s_min with all constants set to 1.

    regime1 (d below n^(2/5) log^(3/5) n): d^(3/2) (log d)^(9/2) n^(-4-2*alpha_d)
    regime2 (up to sqrt(n log n)):         n^(-9/2) (log n)^(-7/2)
    regime3 (d at least sqrt(n log n)):    1/(d^5 n)

    Returns (tag, value); value is None when alpha_d is undefined (p < 2).
    """
    ln_n, ln_d = math.log(n), math.log(d)
    t1 = n ** 0.4 * ln_n ** 0.6
    t2 = math.sqrt(n * ln_n)
    if d >= t2:
        return "regime3", 1.0 / (d ** 5 * n)
    if d >= t1:
        return "regime2", n ** -4.5 * ln_n ** -3.5
    p = int(math.floor(math.sqrt(d / ln_d) / 5.0)) if d >= 3 else 0
    if p < 2:
        return "regime1", None
    alpha_d = math.log(4 * d) / math.log(p) - 2.0
    return "regime1", d ** 1.5 * ln_d ** 4.5 * n ** (-4.0 - 2.0 * alpha_d)


@dataclass
class RunRecord:
    """One campaign trial; reproducible bit-for-bit from (config, trial index)."""

    trial: int
    seed: int
    n: int
    d: int
    z: complex
    spectral: SpectralReport
    v_class: Optional[taxonomy.VectorClass]
    v_class_adjoint: Optional[taxonomy.VectorClass]
    events: list
    bound_n6: bool
    theorem_range: bool
    n6_confirmed: Optional[bool]          # high-precision verdict when bound_n6 fails
    remark33_regime: str
    remark33_ratio: Optional[float]
    singular: bool
    singular_exact: Optional[bool]
    notes: list

    def to_json_dict(self) -> dict:
        return {
            "trial": self.trial, "seed": self.seed, "n": self.n, "d": self.d,
            "z": [self.z.real, self.z.imag],
            "spectral": self.spectral.to_json_dict(),
            "v_class": self.v_class.to_json_dict() if self.v_class else None,
            "v_class_adjoint": (self.v_class_adjoint.to_json_dict()
                                if self.v_class_adjoint else None),
            "events": [e.to_json_dict() for e in self.events],
            "bound_n6": self.bound_n6, "theorem_range": self.theorem_range,
            "n6_confirmed": self.n6_confirmed,
            "remark33_regime": self.remark33_regime,
            "remark33_ratio": self.remark33_ratio,
            "singular": self.singular, "singular_exact": self.singular_exact,
            "notes": self.notes,
        }

    def csv_row(self) -> list:
        return [self.trial, self.seed, self.n, self.d, self.z.real, self.z.imag,
                self.spectral.s_min, self.spectral.s_max,
                self.v_class.pretty() if self.v_class else "n/a",
                str(self.bound_n6).lower(), self.remark33_regime,
                "" if self.remark33_ratio is None else self.remark33_ratio,
                json.dumps([e.to_json_dict() for e in self.events], sort_keys=True)]


def spectral_report_from_json(obj: dict) -> SpectralReport:
    v = np.array([complex(re, im) for re, im in obj["v_min"]], dtype=np.complex128)
    return SpectralReport(s_min=obj["s_min"], s_max=obj["s_max"], v_min=v,
                          residual=obj["residual"], method=obj["method"])


def _run_event_checks(cfg: ExperimentConfig, M: RegularMatrix, trial_seed: int):
    reports = []
    for spec in cfg.checks:
        kind = spec["check"].replace("-", "_")
        if kind == "omega1":
            reports.append(graph_events.check_omega1(M, eps=spec["eps"]))
        elif kind == "omega_k_eps":
            reports.append(graph_events.check_omega_k_eps(
                M, k=spec["k"], eps=spec["eps"], mode=spec.get("mode", "exact"),
                trials=spec.get("trials", 1000), seed=derive_seed(trial_seed, 101)))
        elif kind == "zero_minor":
            reports.append(graph_events.find_zero_minor(
                M, alpha=spec["alpha"], beta=spec["beta"],
                mode=spec.get("mode", "greedy")))
        elif kind == "row_overlap":
            k = spec["k"]
            rng = np.random.Generator(np.random.PCG64(derive_seed(trial_seed, 202)))
            J = sorted(int(j) for j in rng.choice(M.n, size=k, replace=False))
            reports.append(graph_events.row_overlap_bound(M, J, A=spec["A"]))
        else:
            raise ValueError(f"unknown check {spec['check']!r}")
    return reports


def _classify_or_none(v, params, notes, tag):
    if params is None:
        return None
    try:
        return taxonomy.classify(v, params)
    except taxonomy.DegenerateRegimeError as e:  # pragma: no cover - params built already
        notes.append(f"{tag}: {e}")
        return None


def run_trial(cfg: ExperimentConfig, trial: int, n: int, d: int, z: complex) -> RunRecord:
    seed = derive_seed(cfg.master_seed, trial)
    notes: list[str] = []
    M = sample(n, d, cfg.cell_burn_in(n, d), seed)
    rep = singular_extremes(M, z)

    try:
        params = taxonomy.compute_params(n, d, cfg.a1, cfg.a2, cfg.a3)
    except taxonomy.DegenerateRegimeError as e:
        params = None
        notes.append(f"taxonomy params degenerate: {e}")

    v_class = _classify_or_none(rep.v_min, params, notes, "classify v_min")
    v_class_adj = None
    if cfg.include_adjoint and params is not None:
        # the adjoint minimizer is the right minimizer of M^T - conj(z) Id
        adj = singular_extremes(M.transpose(), complex(z).conjugate())
        v_class_adj = _classify_or_none(adj.v_min, params, notes, "classify adjoint")

    events = _run_event_checks(cfg, M, seed)

    n6_threshold = float(n) ** -6
    bound_n6 = rep.s_min >= n6_threshold
    in_range = theorem_range_holds(n, d, z)
    n6_confirmed = None
    if not bound_n6:
        try:
            n6_confirmed, _ = smin_below_threshold_highprec(
                M, z, n6_threshold, dps=int(cfg.thresholds.get("high_prec_dps", 50)))
        except ValueError as e:
            notes.append(f"high-precision recheck unavailable: {e}")

    regime, shape = remark_regime_shape(n, d)
    ratio = None if shape is None else rep.s_min / shape

    singular = numerically_singular(rep, rel=cfg.thresholds.get(
        "singular_rel", 1e-10))
    singular_exact = None
    if singular and n <= EXACT_SINGULARITY_CAP and z == 0:
        singular_exact = is_singular_exact(M)

    return RunRecord(
        trial=trial, seed=seed, n=n, d=d, z=z, spectral=rep, v_class=v_class,
        v_class_adjoint=v_class_adj, events=events, bound_n6=bound_n6,
        theorem_range=in_range, n6_confirmed=n6_confirmed,
        remark33_regime=regime, remark33_ratio=ratio, singular=singular,
        singular_exact=singular_exact, notes=notes)


def _thread_count(threads: Optional[int]) -> int:
    if threads is not None:
        return max(1, threads)
    return max(1, int(os.environ.get("REGDIGRAPH_THREADS", "1")))


def run_campaign(cfg: ExperimentConfig, threads: Optional[int] = None):
    """Run every trial of the grid; returns (records, summary).

    Records arrive in trial order whatever the worker count.  The summary
    carries per-cell aggregates, the sampler chi-square diagnostic whenever
    the enumeration oracle reaches the cell (n <= 7), and the list of
    confirmed red events.
    """
    specs = []
    t = 0
    for n, d, z in cfg.cells():
        for _ in range(cfg.trials):
            specs.append((t, n, d, z))
            t += 1
    workers = _thread_count(threads)
    if workers == 1:
        records = [run_trial(cfg, *s) for s in specs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            records = list(ex.map(lambda s: run_trial(cfg, *s), specs))

    summary = {"cells": [], "shift_range_flags": cfg.shift_range_flags()}
    red = []
    for n, d, z in cfg.cells():
        cell = [r for r in records if (r.n, r.d, r.z) == (n, d, z)]
        smins = [r.spectral.s_min for r in cell]
        frac = sum(r.bound_n6 for r in cell) / len(cell)
        event_freq: dict = {}
        for r in cell:
            for e in r.events:
                key = f"{e.event}:{e.verdict}"
                event_freq[key] = event_freq.get(key, 0) + 1
        chi = None
        if n <= 7:
            stat, dof = uniformity_chi_square(n, d, samples=2000,
                                              burn_in=cfg.cell_burn_in(n, d),
                                              seed=derive_seed(cfg.master_seed, 999))
            chi = {"statistic": stat, "dof": dof}
        summary["cells"].append({
            "n": n, "d": d, "z": [z.real, z.imag],
            "success_fraction": frac,
            "min_s_min": min(smins), "median_s_min": statistics.median(smins),
            "singular_trials": sum(r.singular for r in cell),
            "event_frequencies": event_freq,
            "sampler_chi_square": chi,
        })
        red.extend(r for r in cell
                   if (not r.bound_n6) and r.theorem_range and r.n6_confirmed)
    summary["red_events"] = [{"trial": r.trial, "n": r.n, "d": r.d,
                              "z": [r.z.real, r.z.imag], "s_min": r.spectral.s_min}
                             for r in red]
    summary["overall_success_fraction"] = (
        sum(r.bound_n6 for r in records) / len(records) if records else 1.0)
    return records, summary


# ---------------------------------------------------------------------------
# Persistence


def write_records_jsonl(records, path) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(r.to_json_dict(), sort_keys=True) + "\n")


def write_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow(r.csv_row())


# ---------------------------------------------------------------------------
# Standalone probes


def singularity_rate(n: int, d: int, trials: int, seed: int,
                     burn_in: Optional[int] = None) -> float:
    """Fraction of sampled matrices that are numerically singular at z = 0.

    For n <= 24 every numerical hit is confirmed by exact rational
    elimination (a disagreement raises: the dual thresholds are meant to
    agree on honest inputs).
    """
    burn = burn_in if burn_in is not None else default_burn_in(n, d)
    hits = 0
    for t in range(trials):
        M = sample(n, d, burn, derive_seed(seed, t))
        rep = singular_extremes(M, 0.0)
        flagged = numerically_singular(rep)
        if flagged and n <= EXACT_SINGULARITY_CAP:
            exact = is_singular_exact(M)
            if not exact:
                raise AssertionError(
                    f"numerically singular but exactly nonsingular at trial {t}: "
                    f"s_min={rep.s_min}, s_max={rep.s_max}")
        hits += flagged
    return hits / trials


def bound_table(cfg: ExperimentConfig, records=None, threads: Optional[int] = None):
    """Per-(n, d) cell: regime tag, shape value (c = 1), observed min s_min, ratio."""
    if records is None:
        records, _ = run_campaign(cfg, threads=threads)
    table = []
    seen = set()
    for n, d, _ in cfg.cells():
        if (n, d) in seen:
            continue
        seen.add((n, d))
        cell = [r for r in records if (r.n, r.d) == (n, d)]
        regime, shape = remark_regime_shape(n, d)
        observed = min(r.spectral.s_min for r in cell) if cell else None
        ratio = (observed / shape) if (shape and observed is not None) else None
        table.append({"n": n, "d": d, "regime": regime, "shape": shape,
                      "observed_min_s_min": observed, "ratio": ratio})
    return table
