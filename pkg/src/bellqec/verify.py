"""Acceptance battery: each check returns a pass flag, its worst deviation and notes."""
from __future__ import annotations

import csv
import io
import itertools
import tempfile
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .core import DensityMatrix, StateVector, apply_channel, fidelity, mutual_information, prepare_bell, von_neumann_entropy
from .experiments import ExperimentConfig, SCENARIOS, pattern_scores, rows_to_csv, run, write_rows
from .longdistance import (
    boundary_commutator_coefficient,
    combine_boundary_syndrome,
    local_commutation_bit,
    make_parties,
    run_protocol,
    split_generators,
)
from .pauli import PauliString, Syndrome, syndrome
from .repetition import (
    ChannelModel,
    CodeLayout,
    adjudicate_coefficients,
    closed_form_bipartite_fidelity,
    closed_form_single_fidelity,
    density_matrix_fidelity,
    make_channel,
    polynomial_fidelity,
    unencoded_arbitrary_report,
    unencoded_bell_fidelity,
    weighted_fidelity,
)
from .stabilizer import bell_code_generators, build_syndrome_table, code_size, short_distance_pipeline

P_GRID = tuple(round(0.05 * i, 2) for i in range(21))


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    detail: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}  max_dev={self.max_deviation:.3e}  ({self.elapsed:.2f}s)"


class _Tracker:
    """Accumulates the largest deviation and whether every comparison held."""

    def __init__(self):
        self.ok = True
        self.dev = 0.0
        self.notes: list[str] = []

    def close(self, label: str, got: float, want: float, tol: float) -> bool:
        d = abs(got - want)
        self.dev = max(self.dev, d)
        if not d <= tol:
            self.ok = False
            self.notes.append(f"{label}: got {got!r}, expected {want!r} (tol {tol:g})")
        return d <= tol

    def require(self, label: str, cond: bool) -> bool:
        if not cond:
            self.ok = False
            self.notes.append(f"{label}: failed")
        return bool(cond)

    def result(self, name: str, t0: float) -> CheckResult:
        return CheckResult(name, self.ok, self.dev, self.notes, time.perf_counter() - t0)


def default_golden_path():
    return resources.files("bellqec").joinpath("data/syndrome_table_k1.csv")


def load_golden_table(path=None) -> list[tuple[str, str]]:
    src = default_golden_path() if path is None else Path(path)
    with src.open() as fh:
        return [(r["error"].strip(), r["syndrome"].strip()) for r in csv.DictReader(fh)]


# -------------------------------------------------------------------- checks


def check_table_golden(golden_path=None) -> CheckResult:
    t0 = time.perf_counter()
    t = _Tracker()
    golden = load_golden_table(golden_path)
    table = build_syndrome_table(1)
    gens = bell_code_generators(1)
    t.require("32 golden rows", len(golden) == 32)
    t.require("32 classes", len(table) == 32)
    for i, ((err, syn), cls) in enumerate(zip(golden, table.classes)):
        want = Syndrome.parse(syn)
        got = syndrome(PauliString.from_str(err), gens)
        t.require(f"row {i + 1} {err} syndrome", got == want)
        t.require(f"row {i + 1} representative {cls.representative.letters} vs {err}",
                  cls.representative.letters == err and cls.syndrome == want)
    elapsed = time.perf_counter() - t0
    t.require(f"runtime {elapsed:.3f}s < 1s", elapsed < 1.0)
    return t.result("syndrome_table_golden", t0)


def check_short_distance() -> CheckResult:
    t0 = time.perf_counter()
    t = _Tracker()
    for k in (1, 2):
        n = code_size(k)
        worst = min(short_distance_pipeline(k, PauliString(n, x=m)).fidelity for m in range(1 << n))
        t.close(f"k={k} min fidelity over {1 << n} patterns", worst, 1.0, 1e-12)
    elapsed = time.perf_counter() - t0
    t.require(f"runtime {elapsed:.2f}s < 10s", elapsed < 10.0)
    return t.result("short_distance_correction", t0)


def check_single_closed_form() -> CheckResult:
    t0 = time.perf_counter()
    t = _Tracker()
    for k in (1, 2):
        scores = pattern_scores("qrc-single", k, "bitflip").all()
        for p in (0.05, 0.1, 0.2, 0.3):
            _, f_closed = closed_form_single_fidelity(k, p)
            t.close(f"k={k} p={p} enumeration", weighted_fidelity(scores, p), f_closed, 1e-12)
            t.close(f"k={k} p={p} density matrix", density_matrix_fidelity(CodeLayout(k), p), f_closed, 1e-12)
    t.close("spot k=1 p=0.1", closed_form_single_fidelity(1, 0.1)[1], 0.985900, 1e-6)
    return t.result("single_closed_form", t0)


def check_bipartite_coefficients() -> CheckResult:
    t0 = time.perf_counter()
    t = _Tracker()
    r1 = adjudicate_coefficients(1, "bell")
    t.require("k=1 enumerated f = (1,6,9,0,9,6,1)", r1.enumerated == (1, 6, 9, 0, 9, 6, 1))
    t.require("k=1 published f = (1,6,9,0,9,6,1)", r1.published == (1, 6, 9, 0, 9, 6, 1))
    bell = pattern_scores("qrc-bipartite-bell", 1, "bitflip").all()
    prod = pattern_scores("qrc-bipartite-product", 1, "bitflip").all()
    f_bell, _ = closed_form_bipartite_fidelity(1, 0.1, "bell")
    t.close("k=1 bell closed form vs enumeration", f_bell, weighted_fidelity(bell, 0.1), 1e-6)
    t.close("k=1 bell F(0.1)", weighted_fidelity(bell, 0.1), 0.972403, 1e-6)
    t.close("k=1 bell density matrix", density_matrix_fidelity(CodeLayout(1, "bipartite-bell"), 0.1),
            weighted_fidelity(bell, 0.1), 1e-12)
    t.close("k=1 product F(0.1)", weighted_fidelity(prod, 0.1), 0.972000, 1e-6)
    t.close("k=1 product closed form", closed_form_bipartite_fidelity(1, 0.1, "product")[0],
            weighted_fidelity(prod, 0.1), 1e-6)

    for kind, scenario in (("bell", "qrc-bipartite-bell"), ("product", "qrc-bipartite-product")):
        rep = adjudicate_coefficients(2, kind)
        scores = pattern_scores(scenario, 2, "bitflip").all()
        # self-consistency: the enumerated table reproduces the enumerated fidelity
        for p in (0.05, 0.1, 0.3):
            poly = polynomial_fidelity(rep.enumerated, p)
            t.close(f"k=2 {kind} p={p} table vs patterns", poly, weighted_fidelity(scores, p), 1e-12)
        t.require(f"k=2 {kind} enumeration vs direct count", rep.enumerated == rep.counted)
        t.notes.extend(rep.lines())
        lit = closed_form_bipartite_fidelity(2, 0.1, kind, "published")[0]
        t.notes.append(f"  k=2 {kind} F(0.1): published {lit!r}, enumerated {weighted_fidelity(scores, 0.1)!r}")
    return t.result("bipartite_coefficients", t0)


def check_symmetry_ordering() -> CheckResult:
    t0 = time.perf_counter()
    t = _Tracker()
    for k in (1, 2):
        bell = pattern_scores("qrc-bipartite-bell", k, "bitflip").all()
        prod = pattern_scores("qrc-bipartite-product", k, "bitflip").all()
        for p in P_GRID:
            fb = weighted_fidelity(bell, p)
            t.close(f"k={k} bell F({p}) vs F({1 - p:.2f})", fb, weighted_fidelity(bell, 1 - p), 1e-12)
            t.require(f"k={k} bell >= product at p={p}", fb >= weighted_fidelity(prod, p) - 1e-12)
    for scenario in ("qrc-single", "qrc-bipartite-bell", "qrc-bipartite-product"):
        s1 = pattern_scores(scenario, 1, "bitflip").all()
        s2 = pattern_scores(scenario, 2, "bitflip").all()
        for p in P_GRID:
            if p < 0.5:
                t.require(f"{scenario} F(k=2) >= F(k=1) at p={p}",
                          weighted_fidelity(s2, p) >= weighted_fidelity(s1, p) - 1e-12)
    return t.result("symmetry_ordering", t0)


def check_unencoded_baseline() -> CheckResult:
    t0 = time.perf_counter()
    t = _Tracker()
    bell = prepare_bell(0, 0)
    rho = bell.to_density_matrix()
    values = []
    for p in P_GRID:
        kraus = apply_channel(rho, make_channel(ChannelModel("bitflip", p, 2)), (0, 1))
        f = unencoded_bell_fidelity(p)
        t.close(f"p={p} formula vs Kraus", f, fidelity(bell, kraus), 1e-12)
        values.append(f)
    i = int(np.argmin(values))
    t.close("minimum value", values[i], 0.707107, 1e-6)
    t.require(f"minimum at p=0.5 (found {P_GRID[i]})", P_GRID[i] == 0.5)
    for k in (1, 2):
        enc = pattern_scores("qrc-bipartite-bell", k, "bitflip").all()
        for p in P_GRID:
            if 0 < p < 0.5:
                t.require(f"k={k} encoded > unencoded at p={p}", weighted_fidelity(enc, p) > unencoded_bell_fidelity(p))
    rep = unencoded_arbitrary_report(0.1, grid=16)
    t.notes.append(f"arbitrary product input p=0.1: oracle {rep.oracle:.6f}, "
                   f"reading p -> {rep.linear_reading:.6f}, reading sqrt(p) -> {rep.sqrt_reading:.6f}")
    return t.result("unencoded_baseline", t0)


def check_phaseflip_equivalence() -> CheckResult:
    t0 = time.perf_counter()
    t = _Tracker()
    cases = [("unencoded", 1)] + [(s, k) for s in SCENARIOS[1:] for k in (1, 2)]
    for scenario, k in cases:
        bit = pattern_scores(scenario, k, "bitflip").all()
        phase = pattern_scores(scenario, k, "phaseflip").all()
        for p in (0.05, 0.1, 0.2, 0.3, 0.5):
            t.close(f"{scenario} k={k} p={p}", weighted_fidelity(phase, p), weighted_fidelity(bit, p), 1e-12)
    for p in (0.1, 0.3):
        t.close(f"density matrix k=1 bell p={p}",
                density_matrix_fidelity(CodeLayout(1, "bipartite-bell"), p, "phaseflip"),
                density_matrix_fidelity(CodeLayout(1, "bipartite-bell"), p, "bitflip"), 1e-12)
    return t.result("phaseflip_equivalence", t0)


def check_longdistance() -> CheckResult:
    t0 = time.perf_counter()
    t = _Tracker()
    for k in (1, 2):
        n = code_size(k)
        alice, bob = make_parties(k)
        owner = {q: "alice" for q in alice.qubits} | {q: "bob" for q in bob.qubits}
        worst, cross = 1.0, 0
        for m in range(1 << n):
            res = run_protocol(k, PauliString(n, x=m))
            worst = min(worst, res.fidelity)
            # the audit raises on cross-party gates; recheck the log independently
            for party, _, qubits in res.audit_log:
                cross += any(owner.get(q, party) != party for q in qubits)
            t.require(f"k={k} one message each way", len(res.transcript) == 2)
        t.close(f"k={k} classical channel min fidelity", worst, 1.0, 1e-12)
        t.require(f"k={k} audit log has no cross-party gate", cross == 0)
        for m in range(1 << n):
            e = PauliString(n, x=m)
            b = combine_boundary_syndrome(local_commutation_bit(alice, e), local_commutation_bit(bob, e))
            if b != syndrome(e, [split_generators(k).boundary])[0]:
                t.require(f"k={k} boundary bit for {e.letters}", False)
    nocc = pattern_scores("longdistance-nocc", 1, "bitflip").all()
    for p in P_GRID:
        t.close(f"no channel p={p}", weighted_fidelity(nocc, p), closed_form_bipartite_fidelity(1, p, "bell")[0], 1e-12)
    for m1, m2 in itertools.product((-1, 1), repeat=2):
        t.require(f"commutator identity ({m1},{m2})", boundary_commutator_coefficient(m1, m2) == 0)
    return t.result("longdistance_protocol", t0)


def check_entropy() -> CheckResult:
    t0 = time.perf_counter()
    t = _Tracker()
    rng = np.random.default_rng(7)
    amps = rng.normal(size=8) + 1j * rng.normal(size=8)
    pure = StateVector(amps / np.linalg.norm(amps))
    t.close("S(pure)", von_neumann_entropy(pure.to_density_matrix()), 0.0, 1e-10)
    t.close("S(I/2)", von_neumann_entropy(DensityMatrix.maximally_mixed(1)), 1.0, 1e-10)
    bell = mutual_information(prepare_bell(0, 0).to_density_matrix(), ((0,), (1,)))
    t.close("Bell S_A", bell.S_A, 1.0, 1e-10)
    t.close("Bell S_AB", bell.S_AB, 0.0, 1e-10)
    t.close("Bell S_A|B", bell.S_A_given_B, -1.0, 1e-10)
    t.close("Bell I(A,B)", bell.I_AB, 2.0, 1e-10)
    a = StateVector.from_bloch(0.7, 1.3)
    b = StateVector.from_bloch(2.1, -0.4)
    prod = mutual_information(a.tensor(b).to_density_matrix(), ((0,), (1,)))
    for name, v in prod._asdict().items():
        t.close(f"product {name}", v, 0.0, 1e-10)
    return t.result("entropy_suite", t0)


def check_montecarlo(samples: int = 100_000, seed: int = 0) -> CheckResult:
    t0 = time.perf_counter()
    t = _Tracker()
    base = dict(scenarios=SCENARIOS, ks=(1,), p_values=(0.1,), samples=samples, seed=seed)
    exact = run(ExperimentConfig(**base))
    mc_cfg = ExperimentConfig(**base, method="montecarlo")
    mc = run(mc_cfg)
    for e, m in zip(exact, mc):
        d = abs(e.fidelity - m.fidelity)
        t.dev = max(t.dev, d)
        t.require(f"{m.scenario}: |{m.fidelity:.6f} - {e.fidelity:.6f}| <= 4*{m.stderr:.2e}", d <= 4 * m.stderr + 1e-15)
    with tempfile.TemporaryDirectory() as tmp:
        a = write_rows(run(mc_cfg), Path(tmp) / "a.csv").read_bytes()
        b = write_rows(run(mc_cfg), Path(tmp) / "b.csv").read_bytes()
    t.require("fixed seed output is byte-identical", a == b and a.decode() == rows_to_csv(mc))
    return t.result("montecarlo_agreement", t0)


CHECKS: dict[str, Callable[..., CheckResult]] = {
    "syndrome_table_golden": check_table_golden,
    "short_distance_correction": check_short_distance,
    "single_closed_form": check_single_closed_form,
    "bipartite_coefficients": check_bipartite_coefficients,
    "symmetry_ordering": check_symmetry_ordering,
    "unencoded_baseline": check_unencoded_baseline,
    "phaseflip_equivalence": check_phaseflip_equivalence,
    "longdistance_protocol": check_longdistance,
    "entropy_suite": check_entropy,
    "montecarlo_agreement": check_montecarlo,
}
ALIASES = {"table1": "syndrome_table_golden", "eq24": "bipartite_coefficients",
           **{str(i + 1): name for i, name in enumerate(CHECKS)}}


def resolve(only: Iterable[str] | None) -> list[str]:
    if not only:
        return list(CHECKS)
    names = []
    for item in only:
        for token in item.split(","):
            token = token.strip()
            name = ALIASES.get(token, token)
            if name not in CHECKS:
                raise KeyError(f"unknown check {token!r}; choose from {', '.join([*CHECKS, *ALIASES])}")
            if name not in names:
                names.append(name)
    return names


def run_checks(only: Iterable[str] | None = None, golden_path=None) -> list[CheckResult]:
    out = []
    for name in resolve(only):
        if name == "syndrome_table_golden":
            out.append(check_table_golden(golden_path))
        else:
            out.append(CHECKS[name]())
    return out


def format_report(results: list[CheckResult], verbose: bool = True) -> str:
    buf = io.StringIO()
    for r in results:
        buf.write(r.line() + "\n")
        if verbose:
            for note in r.detail:
                buf.write(f"    {note}\n")
    passed = sum(r.passed for r in results)
    buf.write(f"{passed}/{len(results)} checks passed\n")
    return buf.getvalue()
