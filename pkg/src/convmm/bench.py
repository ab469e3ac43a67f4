"""Benchmark harness: algorithm sweeps over r with seeded trials and reports.

Reproduces the experimental protocol of the source experiments: given a
multiplication budget of roughly r*n^2, run each approximation algorithm for
several trials per r, record normalized/absolute errors and rank diagnostics,
and emit machine-readable per-trial records (CSV or JSON).
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass

import numpy as np

from .analysis import DISTRIBUTIONS, best_rank_r, error_metrics, rank_diagnostics
from .approx import jl_sketch_mm, polyform, stpp_truncated_square, tpp_truncated
from .exact import BlockingScheme, blocked_multiply

ALGORITHMS = ("jl_sketch", "polyform", "tpp_fourier", "stpp_fourier",
              "svd_baseline", "exact_stpp", "naive")

CSV_FIELDS = ("algorithm", "n", "m", "N", "r", "trial", "seed",
              "normalized_error", "absolute_error", "output_rank",
              "nuclear_norm", "sum_sq_singvals", "wall_ms")


@dataclass
class ExperimentConfig:
    algorithm: str
    n: int
    r_schedule: list[int] | None = None
    trials: int = 10
    distribution: str = "rademacher"
    seed: int = 0
    out: str | None = None
    fmt: str = "csv"
    input_a: str | None = None   # optional fixed input matrices (CSV, row-major)
    input_b: str | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be csv or json")

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            data = json.load(fh)
        return cls(**data)

    @property
    def r_max(self) -> int:
        """Top of the budget range: slab width m for stpp_fourier, n otherwise."""
        if self.algorithm == "stpp_fourier":
            ne = self.n + (self.n % 2)
            return ne // 2 + 1
        return self.n

    def schedule(self) -> list[int]:
        if self.r_schedule is not None:
            sched = [int(r) for r in self.r_schedule]
            if any(r < 1 or r > self.r_max for r in sched):
                raise ValueError(f"r values must lie in [1, {self.r_max}]")
            return sorted(set(sched))
        # 10 linear steps between 1 and the top of the range
        return sorted(set(np.linspace(1, self.r_max, 10).round().astype(int).tolist()))


@dataclass
class TrialRecord:
    algorithm: str
    n: int
    m: int | None
    N: int | None
    r: int
    trial: int
    seed: int
    normalized_error: float
    absolute_error: float
    output_rank: int
    nuclear_norm: float
    sum_sq_singvals: float
    wall_ms: float


def _run_algorithm(alg: str, A: np.ndarray, B: np.ndarray, r: int, seed: int):
    """Dispatch one trial; returns (C, m, N)."""
    n = A.shape[0]
    if alg == "jl_sketch":
        return jl_sketch_mm(A, B, r, seed=seed), None, None
    if alg == "polyform":
        return polyform(A, B, min(r, n), seed=seed), None, None
    if alg == "tpp_fourier":
        return tpp_truncated(A, B, r), None, None
    if alg == "stpp_fourier":
        C, ne = stpp_truncated_square(A, B, r, return_effective_size=True)
        return C, ne // 2 + 1, 1
    if alg == "svd_baseline":
        return best_rank_r(A @ B, r), None, None
    if alg == "exact_stpp":
        scheme = BlockingScheme.for_size(n)
        return blocked_multiply(A, B, scheme.m, scheme.N), scheme.m, scheme.N
    if alg == "naive":
        return A @ B, None, None
    raise ValueError(f"unknown algorithm {alg!r}")


def run_experiment(config: ExperimentConfig) -> tuple[list[TrialRecord], list[dict]]:
    """Run the sweep; returns per-trial records plus a per-r summary.

    Per-trial seed is master_seed XOR a running counter over the canonical
    (r, trial) order, so a fixed config is bit-reproducible regardless of
    execution order.
    """
    dist = DISTRIBUTIONS[config.distribution]
    fixed_A = _load_matrix(config.input_a) if config.input_a else None
    fixed_B = _load_matrix(config.input_b) if config.input_b else None
    records: list[TrialRecord] = []
    summary: list[dict] = []
    counter = 0
    for r in config.schedule():
        errs = []
        for trial in range(config.trials):
            seed = config.seed ^ counter
            counter += 1
            rng = np.random.default_rng(seed)
            A = fixed_A if fixed_A is not None else dist.sample(rng, (config.n, config.n))
            B = fixed_B if fixed_B is not None else dist.sample(rng, (config.n, config.n))
            t0 = time.perf_counter()
            C, m, N = _run_algorithm(config.algorithm, A, B, r, seed)
            wall_ms = (time.perf_counter() - t0) * 1e3
            err = error_metrics(C, A @ B, A, B)
            rank = rank_diagnostics(C)
            errs.append(err.normalized_error)
            records.append(TrialRecord(
                config.algorithm, config.n, m, N, r, trial, seed,
                err.normalized_error, err.absolute_error,
                rank.rank, rank.nuclear_norm, rank.sum_sq_singvals, wall_ms))
        errs = np.asarray(errs)
        summary.append({
            "r": int(r),
            "budget": int(r) * config.n**2,
            "mean": float(errs.mean()),
            "std": float(errs.std(ddof=1)) if errs.size > 1 else 0.0,
            "min": float(errs.min()),
            "max": float(errs.max()),
            "reference_1_over_r": 1.0 / r,
        })
    return records, summary


def _load_matrix(path: str) -> np.ndarray:
    M = np.loadtxt(path, delimiter=",", ndmin=2)
    return np.asarray(M, dtype=np.float64)


# ---------------------------------------------------------------------------
# serialization


def _format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def emit(records: list[TrialRecord], fmt: str, path: str | None = None) -> str:
    """Serialize records; writes to ``path`` if given, returns the text."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for rec in records:
            d = asdict(rec)
            writer.writerow([_format_value(d[k]) for k in CSV_FIELDS])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps([asdict(rec) for rec in records], indent=2) + "\n"
    else:
        raise ValueError("format must be csv or json")
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def load_records(path: str) -> list[TrialRecord]:
    """Parse a CSV or JSON record file back into TrialRecord objects."""
    if path.endswith(".json"):
        with open(path) as fh:
            rows = json.load(fh)
    else:
        with open(path) as fh:
            reader = csv.DictReader(fh)
            rows = []
            for row in reader:
                for k in ("n", "r", "trial", "seed", "output_rank"):
                    row[k] = int(row[k])
                for k in ("m", "N"):
                    row[k] = int(row[k]) if row[k] else None
                for k in ("normalized_error", "absolute_error", "nuclear_norm",
                          "sum_sq_singvals", "wall_ms"):
                    row[k] = float(row[k])
                rows.append(row)
    return [TrialRecord(**row) for row in rows]


def render_plot(summary: list[dict], config: ExperimentConfig, path: str) -> None:
    """Mean error vs r with the 1/r reference line, saved as an image."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rs = [row["r"] for row in summary]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(rs, [row["mean"] for row in summary], "o-", label=config.algorithm)
    ax.plot(rs, [row["reference_1_over_r"] for row in summary], "r--", label="1/r reference")
    ax.set_xlabel("r")
    ax.set_ylabel("mean normalized error")
    ax.set_yscale("log")
    ax.set_title(f"{config.algorithm}, n={config.n}, {config.distribution}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
