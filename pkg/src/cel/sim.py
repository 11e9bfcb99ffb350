"""
Stochastic cross-check of the analytics: sample per-node finish times from
the shifted-exponential model and record when the completed set first
becomes decodable.

Determinism contract: a run is a pure function of (seed, trials, model,
code, decoder).  Trials are split into fixed-size chunks, each driven by
its own spawned child of the seed sequence, so the result never depends on
how the chunks might be scheduled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .erasure import _parity_dense, sc_erasure_indicators
from .exectime import StragglerModel
from .gf2 import Gf2Matrix, rank

__all__ = [
    "InfeasibleCode",
    "SimRun",
    "sample_finish_times",
    "job_completion_time",
    "completion_times",
    "run_simulation",
]

_CHUNK = 1 << 16


class InfeasibleCode(Exception):
    """The full set of nodes is not decodable (rank-deficient generator)."""


@dataclass(frozen=True)
class SimRun:
    model: StragglerModel
    decoder: str
    trials: int
    seed: int
    mean_t: float
    std_err: float | None
    percentiles: dict[int, float]

    def to_json(self) -> str:
        return json.dumps({
            "n": self.model.n, "k": self.model.k, "mu": self.model.mu,
            "decoder": self.decoder, "trials": self.trials, "seed": self.seed,
            "mean_t": self.mean_t, "std_err": self.std_err,
            "percentiles": {str(q): t for q, t in self.percentiles.items()},
        })


def sample_finish_times(model: StragglerModel, rng: np.random.Generator) -> np.ndarray:
    """One draw of the n per-node finish times: (1 + Exp(mu)) / k by inverse CDF."""
    return _sample_chunk(model, rng, 1)[0]


def _sample_chunk(model: StragglerModel, rng: np.random.Generator, m: int) -> np.ndarray:
    u = rng.random((m, model.n))
    # -log1p(-u) maps [0,1) onto an exact Exp(1) via 1-u in (0,1]
    return (1.0 - np.log1p(-u) / model.mu) / model.k


def job_completion_time(times, decodable) -> float:
    """Finish time of the first prefix (in completion order) that decodes.

    ``decodable`` takes a set of node indices and must be monotone; the full
    node set must be decodable or the code is infeasible.
    """
    times = np.asarray(times, dtype=np.float64)
    order = np.argsort(times, kind="stable")
    done: set[int] = set()
    for idx in order:
        done.add(int(idx))
        if decodable(frozenset(done)):
            return float(times[idx])
    raise InfeasibleCode("the complete node set is not decodable")


def _ml_completion_chunk(times: np.ndarray, hcols, words, nbits) -> np.ndarray:
    """Completion times under ML decodability for a chunk of trials.

    Feeding the reversed finish order into the first-dependence kernel
    gives the largest independent suffix of stragglers, hence the minimal
    number of completions.
    """
    m, n = times.shape
    order = np.argsort(times, axis=1, kind="stable")
    sorted_t = np.take_along_axis(times, order, axis=1)
    first = _kernels.first_dependence_counts(hcols, words, nbits, order[:, ::-1])
    completions = n - (first - 1)
    return sorted_t[np.arange(m), completions - 1]


def _sc_completion_chunk(times: np.ndarray, info_idx: np.ndarray) -> np.ndarray:
    """Completion times under SC decodability, by batched binary search on
    the completion count (SC success is monotone in the completed set)."""
    m, n = times.shape
    order = np.argsort(times, axis=1, kind="stable")
    sorted_t = np.take_along_axis(times, order, axis=1)
    lo = np.zeros(m, dtype=np.int64)        # undecodable: everything erased
    hi = np.full(m, n, dtype=np.int64)      # all complete always decodes
    pos = np.arange(n)[None, :]
    while np.any(lo + 1 < hi):
        mid = (lo + hi) // 2
        erased = np.zeros((m, n), dtype=bool)
        np.put_along_axis(erased, order, pos >= mid[:, None], axis=1)
        ok = ~sc_erasure_indicators(erased)[:, info_idx].any(axis=1)
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return sorted_t[np.arange(m), hi - 1]


def completion_times(model: StragglerModel, code, decoder: str, trials: int,
                     seed: int, info_set=None) -> np.ndarray:
    """All per-trial completion times; the raw material behind run_simulation.

    ``code`` is a generator matrix, or the string "mds" for the analytic
    pseudo-family whose decodable sets are exactly those of size >= k.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n, k = model.n, model.k
    if isinstance(code, Gf2Matrix):
        if (code.rows, code.cols) != (k, n):
            raise ValueError("generator shape does not match the model")
        if rank(code) != k:
            raise InfeasibleCode("generator matrix is rank deficient")
        if decoder == "ml":
            hcols, words, nbits = _kernels.pack_columns(_parity_dense(code))
        elif decoder == "sc":
            if info_set is None:
                raise ValueError("sc decoding needs the information set")
            info_idx = np.asarray(sorted(int(j) for j in info_set), dtype=np.int64)
        else:
            raise ValueError(f"unknown decoder {decoder!r}")
    elif code != "mds":
        raise ValueError("code must be a Gf2Matrix or 'mds'")

    ss = np.random.SeedSequence(seed)
    children = ss.spawn((trials + _CHUNK - 1) // _CHUNK)
    out = np.empty(trials)
    done = 0
    for child in children:
        m = min(_CHUNK, trials - done)
        times = _sample_chunk(model, np.random.default_rng(child), m)
        if code == "mds":
            t = np.partition(times, k - 1, axis=1)[:, k - 1]
        elif decoder == "ml":
            t = _ml_completion_chunk(times, hcols, words, nbits)
        else:
            t = _sc_completion_chunk(times, info_idx)
        out[done: done + m] = t
        done += m
    return out


def run_simulation(model: StragglerModel, code, decoder: str = "ml",
                   trials: int = 100_000, seed: int = 0, info_set=None,
                   dump_path=None) -> SimRun:
    """Average completion time over independent trials, with summary stats.

    ``dump_path`` optionally receives every completion time as a stream of
    little-endian 64-bit floats for external plotting.
    """
    t = completion_times(model, code, decoder, trials, seed, info_set=info_set)
    if dump_path is not None:
        t.astype("<f8").tofile(dump_path)
    mean = float(np.mean(t))
    std_err = float(np.std(t, ddof=1) / np.sqrt(trials)) if trials > 1 else None
    pct = {q: float(np.percentile(t, q)) for q in (50, 90, 99)}
    return SimRun(model=model, decoder=decoder if isinstance(code, Gf2Matrix) else "order-statistic",
                  trials=trials, seed=seed, mean_t=mean, std_err=std_err,
                  percentiles=pct)
