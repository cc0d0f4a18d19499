"""Test-matrix generators and the (J, K) experiment grid."""

from __future__ import annotations

import csv
import io
import os
import time
from dataclasses import dataclass, field, fields

import numpy as np

from .sketch import LazySketch, Sketch, load
from .streaming import StreamParams, sample_indices, transform

__all__ = [
    "CSV_HEADER",
    "ExperimentConfig",
    "ExperimentRow",
    "gen_exact_sparse",
    "gen_mixture",
    "gen_orthogonal",
    "load_config",
    "rows_to_csv",
    "run_experiment",
    "scaling_benchmark",
    "stream_seed",
]

CSV_HEADER = ["J", "K", "worst_inf_err", "worst_l2_err", "runtime_ratio"]
SCALING_HEADER = ["n", "N", "streaming_seconds", "naive_seconds", "runtime_ratio"]


def gen_orthogonal(n: int, seed: int) -> np.ndarray:
    """Haar-random orthogonal n x n matrix (QR of a Gaussian, R with positive diagonal)."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.where(np.diag(R) < 0, -1.0, 1.0)


def gen_exact_sparse(A: np.ndarray, s: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit x with A x exactly s-sparse, spikes of size 1/sqrt(s) and random sign."""
    m = A.shape[0]
    if not 1 <= s <= m:
        raise ValueError(f"s={s} must lie in [1, m={m}]")
    rng = np.random.default_rng(seed)
    truth = np.zeros(m)
    pos = rng.choice(m, size=s, replace=False)
    truth[pos] = rng.choice([-1.0, 1.0], size=s) / np.sqrt(s)
    return A.T @ truth, truth


def gen_mixture(A: np.ndarray, p: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Entries of A x i.i.d. N(0,1) w.p. p and 0 otherwise, then normalized to unit x."""
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    m = A.shape[0]
    attempt = 0
    while True:
        rng = np.random.default_rng([seed, attempt])
        mask = rng.random(m) < p
        truth = np.where(mask, rng.standard_normal(m), 0.0)
        if truth.any():
            break
        attempt += 1
    x = A.T @ truth
    nrm = np.linalg.norm(x)
    return x / nrm, truth / nrm


@dataclass
class ExperimentConfig:
    n: int = 256
    s: int = 20
    trials: int = 200
    J_grid: list[int] = field(default_factory=lambda: [50, 100, 200, 300, 400, 600, 800])
    K_grid: list[int] = field(default_factory=lambda: [2, 3, 5])
    epsilon: float | None = None  # default: half the spike size 1/sqrt(s)
    delta: float = 0.0
    widen: int = 10
    seed: int = 0
    mode: str = "exact-sparse"
    p: float = 0.05
    matrix_seed: int = 0

    def __post_init__(self):
        if not self.J_grid or not self.K_grid:
            raise ValueError("J_grid and K_grid must be nonempty")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")
        if self.mode not in ("exact-sparse", "gaussian-mixture"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.epsilon is None:
            self.epsilon = 0.5 / np.sqrt(self.s)


def _parse_value(raw: str, typ):
    if typ == "list[int]":
        return [int(t) for t in raw.replace(",", " ").split()]
    if typ == "float | None":
        return None if raw.lower() in ("", "none", "auto") else float(raw)
    return {"int": int, "float": float, "str": str}[typ](raw)


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    """Flat ``key = value`` file; '#' starts a comment; lists are comma separated."""
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    aliases = {"jgrid": "J_grid", "kgrid": "K_grid"}
    kw = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, raw = (t.strip() for t in line.split("=", 1))
            key = aliases.get(key.lower(), key)
            if key not in types:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            kw[key] = _parse_value(raw, types[key])
    return ExperimentConfig(**kw)


@dataclass
class ExperimentRow:
    J: int
    K: int
    worst_inf_err: float
    worst_l2_err: float
    runtime_ratio: float


def stream_seed(seed: int, trial: int, J: int, K: int) -> int:
    return int(np.random.SeedSequence([seed, trial, J, K]).generate_state(1, np.uint64)[0])


def _gen_vector(cfg: ExperimentConfig, A: np.ndarray, trial: int):
    tseed = cfg.seed ^ trial
    if cfg.mode == "exact-sparse":
        return gen_exact_sparse(A, cfg.s, tseed)
    return gen_mixture(A, cfg.p, tseed)


def _time_naive(A: np.ndarray, x: np.ndarray, reps: int = 5) -> float:
    best = np.inf
    for _ in range(reps):
        t0 = time.perf_counter()
        A @ x
        best = min(best, time.perf_counter() - t0)
    return best


def run_experiment(cfg: ExperimentConfig, sketch: Sketch | LazySketch | str | os.PathLike) -> list[ExperimentRow]:
    """Worst-case errors over ``cfg.trials`` transforms at every (J, K) grid point.

    Index sampling and column fetches are done before the clock starts; the
    timed region is everything that depends on x. Vectors depend only on
    (seed, trial), so each grid point sees the same trials.
    """
    sk = load(sketch) if isinstance(sketch, (str, os.PathLike)) else sketch
    if sk.n != cfg.n:
        raise ValueError(f"sketch has n={sk.n} but the config asks for n={cfg.n}")
    A = sk.matrix
    trials = [_gen_vector(cfg, A, t) for t in range(cfg.trials)]
    naive = [_time_naive(A, x) for x, _ in trials]
    rows = []
    for K in cfg.K_grid:
        for J in cfg.J_grid:
            if cfg.trials == 0:
                continue
            inf_err = l2_err = 0.0
            ratios = []
            for t, (x, _) in enumerate(trials):
                p = StreamParams(cfg.epsilon, cfg.delta, cfg.s, J, K, cfg.widen,
                                 stream_seed(cfg.seed, t, J, K))
                idx = sample_indices(sk.L, p.N, p.seed)
                cols = sk.columns_at(idx)
                t0 = time.perf_counter()
                res = transform(sk, x, p, indices=idx, columns=cols)
                elapsed = time.perf_counter() - t0
                ax = A @ x
                inf_err = max(inf_err, float(np.abs(res.estimate.mu - ax).max()))
                l2_err = max(l2_err, float(np.linalg.norm(res.dense(sk.m) - ax)))
                ratios.append(elapsed / naive[t])
            rows.append(ExperimentRow(J, K, inf_err, l2_err, float(np.mean(ratios))))
    return rows


def rows_to_csv(rows, header=CSV_HEADER) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        vals = [getattr(r, h) for h in header] if not isinstance(r, dict) else [r[h] for h in header]
        w.writerow([repr(v) if isinstance(v, float) else v for v in vals])
    return buf.getvalue()


def scaling_benchmark(ns: list[int], N: int, s: int, K: int = 2, widen: int = 10,
                      seed: int = 0, reps: int = 7) -> list[dict]:
    """Streaming time at fixed (N, s) for several n, with m = n orthogonal A.

    Columns come from a LazySketch (computed before the clock starts), so no
    full sketch is stored. Time is the minimum over ``reps`` runs.
    """
    if N % K:
        raise ValueError("N must be a multiple of K")
    out = []
    for n in ns:
        A = gen_orthogonal(n, seed)
        sk = LazySketch(A)
        x, truth = gen_exact_sparse(A, s, seed)
        eps = 0.5 / np.sqrt(s)
        p = StreamParams(eps, 0.0, s, N // K, K, widen, seed)
        idx = sample_indices(sk.L, p.N, p.seed)
        cols = sk.columns_at(idx)
        best = np.inf
        for _ in range(reps):
            t0 = time.perf_counter()
            transform(sk, x, p, indices=idx, columns=cols)
            best = min(best, time.perf_counter() - t0)
        naive = _time_naive(A, x, reps)
        out.append({"n": n, "N": N, "streaming_seconds": best, "naive_seconds": naive,
                    "runtime_ratio": best / naive})
    return out
