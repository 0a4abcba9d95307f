"""Stabilizer decoding of repetition-encoded Bell pairs.

The encoded pair ``(|0..0>|0..0> + |1..1>|1..1>)/sqrt2`` on ``n = 2(2k+1)``
qubits is fixed by ``Z_1 Z_j`` (j = 2..n) and by X on every qubit.  Bit-flip
errors that differ by the all-X string act identically on it, so the syndrome
under these generators pins down every bit-flip error up to that symmetry.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .core import StateVector, X, apply_gates, reduced_overlap
from .pauli import (
    GeneratorSet,
    PauliString,
    Syndrome,
    measure_syndrome_circuit,
    syndrome,
)
from .repetition import CodeLayout, apply_flip_pattern, cached_pipeline

MAX_TABLE_K = 3


def code_size(k: int) -> int:
    if k < 1:
        raise ValueError("code order k must be >= 1")
    return 2 * (2 * k + 1)


def _zz(n: int, a: int, b: int) -> PauliString:
    return PauliString.from_sites(n, "Z", (a, b))


@lru_cache(maxsize=None)
def bell_code_generators(k: int) -> GeneratorSet:
    """Z1Z2, Z1Z3, ..., Z1Zn, X...X in that order (labels are 1-based)."""
    n = code_size(k)
    gens = [_zz(n, 0, j) for j in range(1, n)] + [PauliString.from_sites(n, "X", range(n))]
    labels = [f"Z1Z{j + 1}" for j in range(1, n)] + [f"X^{n}"]
    return GeneratorSet(gens, labels)


@lru_cache(maxsize=None)
def product_code_generators(k: int) -> GeneratorSet:
    """Per-block repetition checks only: 2k on Alice's block, 2k on Bob's."""
    n = code_size(k)
    b = 2 * k + 1
    gens, labels = [], []
    for first in (0, b):
        for j in range(first + 1, first + b):
            gens.append(_zz(n, first, j))
            labels.append(f"Z{first + 1}Z{j + 1}")
    return GeneratorSet(gens, labels)


@lru_cache(maxsize=None)
def encoded_bell_state(k: int) -> StateVector:
    return cached_pipeline(CodeLayout(k, "bipartite-bell")).encoded


def distinct_syndromes(gens: GeneratorSet, errors: Iterable[PauliString]) -> int:
    return len({syndrome(e, gens) for e in errors})


def bitflip_errors(n: int) -> Iterable[PauliString]:
    return (PauliString(n, x=m) for m in range(1 << n))


# ----------------------------------------------------------- syndrome table


@dataclass(frozen=True)
class SyndromeClass:
    class_id: int
    syndrome: Syndrome
    representative: PauliString
    members: tuple[PauliString, ...]

    @property
    def min_weight(self) -> int:
        return self.representative.weight


def _rep_key(p: PauliString) -> tuple:
    # lowest weight first; equal weights ordered by their 1-based support,
    # which puts the member containing qubit 1 ahead of its complement
    return (p.weight, tuple(p.support))


@dataclass(frozen=True)
class SyndromeTable:
    k: int
    classes: tuple[SyndromeClass, ...]

    def __post_init__(self):
        object.__setattr__(self, "_by_syndrome", {c.syndrome: c for c in self.classes})

    def __len__(self):
        return len(self.classes)

    def lookup(self, s: Syndrome) -> SyndromeClass:
        return self._by_syndrome[s]

    def rows(self) -> list[tuple[str, str, int, str]]:
        """(error, syndrome, class_id, min_weight_rep) for every bit-flip pattern."""
        out = []
        for c in self.classes:
            for m in c.members:
                out.append((m.letters, str(c.syndrome), c.class_id, c.representative.letters))
        return out

    def to_csv(self, fh=None) -> str | None:
        """Write the table as CSV; returns the text when ``fh`` is None."""
        target = io.StringIO() if fh is None else fh
        w = csv.writer(target, lineterminator="\n")
        w.writerow(["error", "syndrome", "class_id", "min_weight_rep"])
        w.writerows(self.rows())
        return target.getvalue() if fh is None else None


def build_syndrome_table(k: int) -> SyndromeTable:
    if k > MAX_TABLE_K:
        raise ValueError(f"exhaustive table limited to k <= {MAX_TABLE_K}")
    gens = bell_code_generators(k)
    groups: dict[Syndrome, list[PauliString]] = {}
    for e in bitflip_errors(gens.num_qubits):
        groups.setdefault(syndrome(e, gens), []).append(e)
    ordered = sorted(groups.items(), key=lambda kv: _rep_key(min(kv[1], key=_rep_key)))
    classes = []
    for cid, (s, members) in enumerate(ordered):
        members = sorted(members, key=_rep_key)
        classes.append(SyndromeClass(cid, s, members[0], tuple(members)))
    return SyndromeTable(k, tuple(classes))


def rotation_correct(s: Syndrome | Iterable[int], k: int) -> PauliString:
    """Bit-flip correction read off the syndrome in the Z1Zj, X...X order.

    Rotating the syndrome right by one puts the (always +1) all-X bit first;
    position j then reads +1 exactly when qubit j flipped together with qubit
    1.  X on those positions is the error or its complement; the lighter of
    the two is returned.
    """
    bits = tuple(s)
    n = code_size(k)
    if len(bits) != n:
        raise ValueError(f"syndrome has {len(bits)} bits, expected {n}")
    if bits[-1] != 1:
        raise ValueError("all-X syndrome bit is -1: not a bit-flip error")
    rotated = (bits[-1],) + bits[:-1]
    mask = sum(1 << q for q, b in enumerate(rotated) if b == 1)
    comp = mask ^ ((1 << n) - 1)
    if bin(comp).count("1") < bin(mask).count("1"):
        mask = comp
    return PauliString(n, x=mask)


# ----------------------------------------------------------------- pipeline


@dataclass(frozen=True)
class ShortDistanceResult:
    syndrome: Syndrome
    correction: PauliString
    fidelity: float


def measure_all(state: StateVector, gens: GeneratorSet, rng=None) -> tuple[Syndrome, StateVector]:
    bits = []
    for g in gens:
        outcome, state = measure_syndrome_circuit(state, g, rng)
        bits.append(outcome)
    return Syndrome(tuple(bits)), state


def short_distance_pipeline(k: int, error: PauliString, channel: str = "bitflip",
                            rng=None) -> ShortDistanceResult:
    """Encode |phi+>, apply ``error``, measure every generator, correct, decode.

    With ``channel="phaseflip"`` the error must be Z-only and is applied inside
    the Hadamard sandwich, which turns it into the matching bit-flip pattern.
    """
    layout = CodeLayout(k, "bipartite-bell")
    n = layout.num_qubits
    if error.num_qubits != n:
        raise ValueError(f"error must act on {n} qubits")
    if channel == "bitflip":
        if not error.is_bitflip:
            raise ValueError("bit-flip pipeline expects an X-only error")
        mask = error.x
    elif channel == "phaseflip":
        if error.x:
            raise ValueError("phase-flip pipeline expects a Z-only error")
        mask = error.z
    else:
        raise ValueError(f"unknown channel kind {channel!r}")
    pipe = cached_pipeline(layout, channel)
    noisy = apply_flip_pattern(pipe.encoded, mask, channel, pipe.sandwich)
    s, noisy = measure_all(noisy, bell_code_generators(k), rng)
    corr = rotation_correct(s, k)
    fixed = apply_gates(noisy, [X(q) for q in corr.support])
    decoded = apply_gates(fixed, pipe.decoder)
    ov = reduced_overlap(decoded, pipe.input_state, layout.data_qubits)
    return ShortDistanceResult(s, corr, float(np.sqrt(min(1.0, ov))))


def phase_flip_transparency_check(k: int, error: PauliString) -> bool:
    """Whether a Z-only error leaves the encoded Bell pair untouched.

    The answer is taken from the statevector and must agree with the parity
    rule (even weight is transparent); a disagreement raises RuntimeError.
    """
    n = code_size(k)
    if error.num_qubits != n or error.x:
        raise ValueError(f"expected a Z-only string on {n} qubits")
    psi = encoded_bell_state(k)
    unchanged = abs(psi.overlap(error.apply(psi))) > 1 - 1e-12
    if unchanged != (error.weight % 2 == 0):
        raise RuntimeError(f"parity rule violated for {error}")
    return unchanged
