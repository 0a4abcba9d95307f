"""Exact-enumeration and Monte Carlo fidelity experiments with CSV/JSON output."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from functools import lru_cache
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .core import H, prepare_bell
from .pauli import PauliString
from .repetition import (
    CHANNEL_KINDS,
    CodeLayout,
    apply_flip_pattern,
    cached_pipeline,
    snap_score,
    weighted_fidelity,
)

SCENARIOS = (
    "unencoded",
    "qrc-single",
    "qrc-bipartite-bell",
    "qrc-bipartite-product",
    "stabilizer-short",
    "longdistance-cc",
    "longdistance-nocc",
)
METHODS = ("exact", "montecarlo")
EXACT_QUBIT_CAP = 14


class ConfigError(ValueError):
    pass


def parse_p_range(text: str) -> tuple[float, ...]:
    """``START:STOP:STEP`` with STOP included; an empty range yields ()."""
    try:
        start, stop, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise ConfigError(f"p-range must be START:STOP:STEP, got {text!r}") from None
    if step <= 0:
        raise ConfigError("p-range step must be positive")
    if stop < start:
        return ()
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 12) for i in range(count))


@dataclass(frozen=True)
class ExperimentConfig:
    scenarios: tuple[str, ...] = ("qrc-bipartite-bell",)
    ks: tuple[int, ...] = (1,)
    channel: str = "bitflip"
    p_values: tuple[float, ...] = (0.1,)
    method: str = "exact"
    samples: int = 100_000
    seed: int = 0
    out: str | None = None
    fmt: str = "csv"
    timing: bool = False
    workers: int = 1

    def __post_init__(self):
        for s in self.scenarios:
            if s not in SCENARIOS:
                raise ConfigError(f"unknown scenario {s!r}")
        if self.channel not in CHANNEL_KINDS:
            raise ConfigError(f"unknown channel {self.channel!r}")
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.fmt!r}")
        if any(k < 1 for k in self.ks):
            raise ConfigError("k must be >= 1")
        if any(not 0 <= p <= 1 for p in self.p_values):
            raise ConfigError("p values must lie in [0, 1]")
        if self.method == "montecarlo" and self.samples < 1:
            raise ConfigError("montecarlo needs samples >= 1")
        if self.method == "exact":
            for s in self.scenarios:
                for k in self.ks:
                    n = scenario_qubits(s, k)
                    if n > EXACT_QUBIT_CAP:
                        raise ConfigError(f"exact {s} at k={k} needs {n} qubits (cap {EXACT_QUBIT_CAP})")


@dataclass(frozen=True)
class ResultRow:
    scenario: str
    k: int
    channel: str
    p: float
    method: str
    fidelity: float
    stderr: float
    samples: int
    seed: int
    wall_time: float


ROW_FIELDS = tuple(f.name for f in fields(ResultRow))


# ---------------------------------------------------------------- scenarios


def scenario_qubits(scenario: str, k: int) -> int:
    if scenario == "unencoded":
        return 2
    if scenario == "qrc-single":
        return 2 * k + 1
    return 2 * (2 * k + 1)


def _unencoded_scorer(channel: str) -> Callable[[int], float]:
    bell = prepare_bell(0, 0)
    sandwich = [H(0), H(1)]
    return lambda m: abs(bell.overlap(apply_flip_pattern(bell, m, channel, sandwich))) ** 2


def _scorer(scenario: str, k: int, channel: str) -> Callable[[int], float]:
    n = scenario_qubits(scenario, k)
    if scenario == "unencoded":
        return _unencoded_scorer(channel)
    if scenario == "qrc-single":
        return cached_pipeline(CodeLayout(k, "single"), channel).overlap
    if scenario == "qrc-bipartite-bell":
        return cached_pipeline(CodeLayout(k, "bipartite-bell"), channel).overlap
    if scenario == "qrc-bipartite-product":
        return cached_pipeline(CodeLayout(k, "bipartite-product"), channel).overlap
    if scenario == "stabilizer-short":
        from .stabilizer import short_distance_pipeline

        return lambda m: short_distance_pipeline(k, _error(n, m, channel), channel).fidelity ** 2
    if scenario in ("longdistance-cc", "longdistance-nocc"):
        from .longdistance import run_protocol

        cc = scenario == "longdistance-cc"
        return lambda m: run_protocol(k, _error(n, m, channel), cc, channel).fidelity ** 2
    raise ConfigError(f"unknown scenario {scenario!r}")


def _error(n: int, mask: int, channel: str) -> PauliString:
    return PauliString(n, x=mask) if channel == "bitflip" else PauliString(n, z=mask)


class PatternScores:
    """Lazily evaluated per-pattern squared overlaps for one scenario."""

    def __init__(self, scenario: str, k: int, channel: str):
        self.num_qubits = scenario_qubits(scenario, k)
        self._score = _scorer(scenario, k, channel)
        self._cache: dict[int, float] = {}

    def __getitem__(self, mask: int) -> float:
        v = self._cache.get(mask)
        if v is None:
            v = self._cache[mask] = snap_score(float(self._score(int(mask))))
        return v

    def all(self) -> np.ndarray:
        return np.array([self[m] for m in range(1 << self.num_qubits)])


@lru_cache(maxsize=128)
def pattern_scores(scenario: str, k: int, channel: str) -> PatternScores:
    return PatternScores(scenario, k, channel)


# ------------------------------------------------------------------ methods


def _points(config: ExperimentConfig):
    i = 0
    for scenario in config.scenarios:
        ks = (0,) if scenario == "unencoded" else config.ks
        for k in ks:
            for p in config.p_values:
                yield i, scenario, k, p
                i += 1


def exact_point(config: ExperimentConfig, scenario: str, k: int, p: float) -> ResultRow:
    t0 = time.perf_counter()
    scores = pattern_scores(scenario, max(k, 1), config.channel).all()
    f = weighted_fidelity(scores, p)
    wall = time.perf_counter() - t0 if config.timing else 0.0
    return ResultRow(scenario, k, config.channel, p, "exact", f, 0.0, scores.size, config.seed, wall)


def point_rng(seed: int, index: int) -> np.random.Generator:
    """PCG64 stream for one sweep point, independent of evaluation order."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def montecarlo_point(config: ExperimentConfig, index: int, scenario: str, k: int, p: float) -> ResultRow:
    """Mean squared overlap over Bernoulli(p) flip patterns, then its square root.

    The standard error of F is propagated from that of F^2 by the delta
    method, se(F) = se(F^2) / (2F).
    """
    t0 = time.perf_counter()
    scores = pattern_scores(scenario, max(k, 1), config.channel)
    n = scores.num_qubits
    rng = point_rng(config.seed, index)
    flips = rng.random((config.samples, n)) < p
    masks = flips.astype(np.int64) @ (1 << np.arange(n, dtype=np.int64))
    uniq, counts = np.unique(masks, return_counts=True)
    loss = 1.0 - np.array([scores[m] for m in uniq])
    mean_loss = float(np.dot(counts, loss) / config.samples)
    mean = 1.0 - mean_loss
    if config.samples > 1:
        var = float(np.dot(counts, (loss - mean_loss) ** 2) / (config.samples - 1))
    else:
        var = 0.0
    se_sq = math.sqrt(var / config.samples)
    f = math.sqrt(min(1.0, max(0.0, mean)))
    if se_sq == 0:
        se = 0.0
    elif f > 0:
        se = se_sq / (2 * f)
    else:
        se = math.sqrt(se_sq)
    wall = time.perf_counter() - t0 if config.timing else 0.0
    return ResultRow(scenario, k, config.channel, p, "montecarlo", f, se, config.samples, config.seed, wall)


def _run_point(args) -> ResultRow:
    config, i, scenario, k, p = args
    if config.method == "exact":
        return exact_point(config, scenario, k, p)
    return montecarlo_point(config, i, scenario, k, p)


def run(config: ExperimentConfig) -> list[ResultRow]:
    """All (scenario, k, p) points in config order."""
    jobs = [(config, *pt) for pt in _points(config)]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            return list(pool.map(_run_point, jobs))
    return [_run_point(j) for j in jobs]


def enumerate_exact(config: ExperimentConfig) -> list[ResultRow]:
    if config.method != "exact":
        config = _replace(config, method="exact")
    return run(config)


def monte_carlo(config: ExperimentConfig) -> list[ResultRow]:
    if config.method != "montecarlo":
        config = _replace(config, method="montecarlo")
    return run(config)


def _replace(config: ExperimentConfig, **changes) -> ExperimentConfig:
    return ExperimentConfig(**{**asdict(config), **changes})


# ------------------------------------------------------------------- output


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROW_FIELDS)
    for r in rows:
        w.writerow([_fmt(getattr(r, f)) for f in ROW_FIELDS])
    return buf.getvalue()


def rows_to_json(rows: Sequence[ResultRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2) + "\n"


def rows_to_gnuplot(rows: Sequence[ResultRow]) -> str:
    """Whitespace columns ``p fidelity stderr``, one blank-line-separated block per series."""
    out, last = [], None
    for r in rows:
        key = (r.scenario, r.k)
        if key != last:
            if last is not None:
                out.append("\n")
            out.append(f"# {r.scenario} k={r.k} {r.channel} {r.method}\n")
            last = key
        out.append(f"{r.p!r} {r.fidelity!r} {r.stderr!r}\n")
    return "".join(out)


def write_rows(rows: Sequence[ResultRow], path: str | Path, fmt: str = "csv", gnuplot: bool = False) -> Path:
    path = Path(path)
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows)
    try:
        path.write_text(text)
        if gnuplot:
            path.with_suffix(".dat").write_text(rows_to_gnuplot(rows))
    except OSError as exc:
        raise OSError(f"could not write results to {path}: {exc}") from exc
    return path


def sweep(config: ExperimentConfig, gnuplot: bool = False) -> list[ResultRow]:
    """Run every point and write them to ``config.out`` when set."""
    rows = run(config)
    if config.out:
        write_rows(rows, config.out, config.fmt, gnuplot)
    return rows
