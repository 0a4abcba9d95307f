"""(2k+1, 1) repetition code: circuits, bit/phase-flip channels, closed forms.

Each block is ``2k+1`` consecutive qubits whose first qubit carries the data;
the remaining ``2k`` are ancillas.  Bipartite layouts put Alice's block first
(qubits ``0..2k``) and Bob's second.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb, isclose, sqrt
from typing import Callable, Sequence

import numpy as np

from .core import (
    CNOT,
    H,
    X_MATRIX,
    Gate,
    KrausChannel,
    StateVector,
    apply_channel,
    apply_gates,
    controlled,
    fidelity,
    partial_trace,
    reduced_overlap,
)
from .pauli import PauliString, _apply_to_amplitudes

SCENARIOS = ("single", "bipartite-bell", "bipartite-product")
CHANNEL_KINDS = ("bitflip", "phaseflip")


@dataclass(frozen=True)
class CodeLayout:
    k: int
    scenario: str = "single"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("code order k must be >= 1")
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")

    @property
    def block_size(self) -> int:
        return 2 * self.k + 1

    @property
    def num_blocks(self) -> int:
        return 1 if self.scenario == "single" else 2

    @property
    def num_qubits(self) -> int:
        return self.num_blocks * self.block_size

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        b = self.block_size
        return tuple(tuple(range(i * b, (i + 1) * b)) for i in range(self.num_blocks))

    @property
    def data_qubits(self) -> tuple[int, ...]:
        return tuple(block[0] for block in self.blocks)

    @property
    def ancillas(self) -> tuple[int, ...]:
        return tuple(q for block in self.blocks for q in block[1:])

    @property
    def alice(self) -> tuple[int, ...]:
        return self.blocks[0]

    @property
    def bob(self) -> tuple[int, ...]:
        if self.num_blocks < 2:
            raise ValueError("single-block layout has no Bob partition")
        return self.blocks[1]


@dataclass(frozen=True)
class ChannelModel:
    kind: str
    p: float
    arity: int = 1

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if not 0 <= self.p <= 1:
            raise ValueError(f"flip probability {self.p} outside [0, 1]")
        if self.arity < 1:
            raise ValueError("arity must be >= 1")

    @property
    def letter(self) -> str:
        return "X" if self.kind == "bitflip" else "Z"

    def pattern_probability(self, mask: int) -> float:
        m = bin(mask).count("1")
        return self.p**m * (1 - self.p) ** (self.arity - m)


# ------------------------------------------------------------------ circuits


def build_encoder(layout: CodeLayout) -> list[Gate]:
    """CNOT fan-out from each block's data qubit onto its ancillas."""
    return [CNOT(block[0], a) for block in layout.blocks for a in block[1:]]


def encode(state: StateVector, layout: CodeLayout) -> StateVector:
    """Run the encoder after checking that every ancilla starts in |0>."""
    if state.num_qubits != layout.num_qubits:
        raise ValueError(f"state has {state.num_qubits} qubits, layout needs {layout.num_qubits}")
    anc = sum(1 << q for q in layout.ancillas)
    idx = np.nonzero(np.abs(state.amplitudes) > 1e-12)[0]
    if any(int(i) & anc for i in idx):
        raise ValueError("ancillas must start in |0>")
    return apply_gates(state, build_encoder(layout))


def _correction_gates(block: Sequence[int], k: int) -> list[Gate]:
    # X on the data qubit for every ancilla pattern with more than k ones
    data, ancillas = block[0], tuple(block[1:])
    gates = []
    for weight in range(k + 1, len(ancillas) + 1):
        for ones in combinations(range(len(ancillas)), weight):
            state = tuple(1 if i in ones else 0 for i in range(len(ancillas)))
            gates.append(controlled(ancillas, data, X_MATRIX, state))
    return gates


def build_decoder(layout: CodeLayout) -> list[Gate]:
    """Inverse encoder followed by the coherent majority correction per block."""
    gates = list(reversed(build_encoder(layout)))
    for block in layout.blocks:
        gates += _correction_gates(block, layout.k)
    return gates


def majority_decode(readings, k: int):
    """Flip decision from measured ancilla Z values (+1/-1).

    ``readings`` is one block's values or a sequence of blocks; the return
    value mirrors that shape.
    """
    if readings and isinstance(readings[0], (list, tuple, np.ndarray)):
        return [majority_decode(list(r), k) for r in readings]
    if any(r not in (-1, 1) for r in readings):
        raise ValueError("ancilla readings must be +-1")
    return sum(1 for r in readings if r == -1) > k


def make_channel(model: ChannelModel) -> KrausChannel:
    """Tensor-power Pauli channel {sqrt(p) P, sqrt(1-p) I}^(x arity)."""
    n = model.arity
    ops = []
    for mask in range(1 << n):
        w = model.pattern_probability(mask)
        if w > 0:
            ops.append((sqrt(w), PauliString.from_sites(n, model.letter, _bits(mask))))
    return KrausChannel(tuple(ops))


def phaseflip_sandwich(layout: CodeLayout) -> list[Gate]:
    """Hadamard layer placed on every code qubit both before and after the channel."""
    return [H(q) for q in range(layout.num_qubits)]


def _bits(mask: int) -> list[int]:
    return [q for q in range(mask.bit_length()) if (mask >> q) & 1]


# ------------------------------------------------------------- closed forms


def closed_form_single_fidelity(k: int, p: float) -> tuple[float, float]:
    """Probability ``P`` of at most k flips among 2k+1 qubits, and ``F = sqrt(P)``."""
    n = 2 * k + 1
    P = sum(comb(n, r) * p**r * (1 - p) ** (n - r) for r in range(k + 1))
    return P, sqrt(P)


def published_coefficients(k: int, kind: str) -> tuple[int, ...]:
    """Bipartite success coefficients exactly as the published piecewise formula reads."""
    _check_kind(kind)
    b = 2 * k + 1
    n = 2 * b
    f = [0] * (n + 1)
    for i in range(n + 1):
        if i <= k:
            f[i] = comb(n, i)
        elif i <= 2 * k:
            f[i] = sum(comb(b, j) * comb(b, i - j) for j in range(1, i))
        elif i == b:
            f[i] = 0
        elif kind == "bell":
            f[i] = f[n - i]
    return tuple(f)


def counted_coefficients(k: int, kind: str) -> tuple[int, ...]:
    """Number of weight-i patterns the per-block decoders handle, counted directly.

    A pattern with ``a`` flips on Alice's block and ``b`` on Bob's succeeds when
    both blocks are correctable, or (Bell input only) when both blocks fail,
    since the two residual logical flips cancel on |phi+>.
    """
    _check_kind(kind)
    b = 2 * k + 1
    f = [0] * (2 * b + 1)
    for na in range(b + 1):
        for nb in range(b + 1):
            ok = (na <= k and nb <= k) or (kind == "bell" and na > k and nb > k)
            if ok:
                f[na + nb] += comb(b, na) * comb(b, nb)
    return tuple(f)


def polynomial_fidelity(coefficients: Sequence[float], p: float) -> float:
    n = len(coefficients) - 1
    val = sum(c * p**i * (1 - p) ** (n - i) for i, c in enumerate(coefficients))
    return sqrt(min(1.0, max(0.0, val)))


def closed_form_bipartite_fidelity(k: int, p: float, kind: str = "bell",
                                   form: str = "published") -> tuple[float, tuple[int, ...]]:
    """Encoded Bell/product fidelity and its coefficient table.

    ``form="published"`` uses the published coefficients verbatim, ``form="counted"``
    the directly counted ones.  They coincide for k=1 and differ from k=2 on
    (see :func:`adjudicate_coefficients`).
    """
    if form == "published":
        f = published_coefficients(k, kind)
    elif form == "counted":
        f = counted_coefficients(k, kind)
    else:
        raise ValueError(f"unknown form {form!r}")
    return polynomial_fidelity(f, p), f


def _check_kind(kind: str):
    if kind not in ("bell", "product"):
        raise ValueError(f"kind must be 'bell' or 'product', not {kind!r}")


@dataclass(frozen=True)
class UnencodedReport:
    p: float
    oracle: float
    linear_reading: float
    sqrt_reading: float
    argmin: tuple[float, float]


def unencoded_bell_fidelity(p: float) -> float:
    return sqrt(p**2 + (1 - p) ** 2)


def unencoded_arbitrary_report(p: float, grid: int = 32) -> UnencodedReport:
    """Worst-case fidelity of psi(x)psi under independent bit flips, by Bloch grid search.

    Also reports the two published readings (``p`` and ``sqrt(p)``) for comparison.
    """
    if not 0 <= p <= 1:
        raise ValueError("p outside [0, 1]")
    channel = make_channel(ChannelModel("bitflip", p, 2))
    best, arg = 2.0, (0.0, 0.0)
    for theta in np.linspace(0, np.pi, grid):
        for phi in np.linspace(0, 2 * np.pi, grid, endpoint=False):
            one = StateVector.from_bloch(theta, phi)
            psi = one.tensor(one)
            f = fidelity(psi, apply_channel(psi.to_density_matrix(), channel, (0, 1)))
            if f < best - 1e-15:
                best, arg = f, (float(theta), float(phi))
    return UnencodedReport(p, best, p, sqrt(p), arg)


def unencoded_min_fidelity(p: float, kind: str = "bell") -> float:
    if not 0 <= p <= 1:
        raise ValueError("p outside [0, 1]")
    if kind == "bell":
        return unencoded_bell_fidelity(p)
    if kind == "arbitrary":
        return unencoded_arbitrary_report(p).oracle
    raise ValueError(f"kind must be 'bell' or 'arbitrary', not {kind!r}")


# ---------------------------------------------------------------- pipelines


def embed(state: StateVector, positions: Sequence[int], num_qubits: int) -> StateVector:
    """Place ``state`` on ``positions`` of an otherwise |0...0> register."""
    amps = np.zeros(1 << num_qubits, dtype=complex)
    for i, a in enumerate(state.amplitudes):
        idx = sum(((i >> j) & 1) << q for j, q in enumerate(positions))
        amps[idx] = a
    return StateVector(amps)


def apply_flip_pattern(state: StateVector, mask: int, kind: str = "bitflip",
                       sandwich: Sequence[Gate] = ()) -> StateVector:
    """Apply the flip pattern ``mask``; phase flips go inside the Hadamard sandwich."""
    n = state.num_qubits
    if kind == "bitflip":
        return StateVector(_apply_to_amplitudes(PauliString(n, x=mask), state.amplitudes))
    if kind != "phaseflip":
        raise ValueError(f"unknown channel kind {kind!r}")
    state = apply_gates(state, sandwich)
    state = StateVector(_apply_to_amplitudes(PauliString(n, z=mask), state.amplitudes))
    return apply_gates(state, sandwich)


def default_input(layout: CodeLayout) -> StateVector:
    if layout.scenario == "single":
        return StateVector.basis([0])
    if layout.scenario == "bipartite-bell":
        return StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2))
    return StateVector.basis([0, 0])


@dataclass
class RepetitionPipeline:
    """Encode, corrupt, decode and score one flip pattern at a time.

    The score is the squared overlap of the decoded data qubits with the input.
    """

    layout: CodeLayout
    channel: str = "bitflip"
    input_state: StateVector | None = None

    def __post_init__(self):
        if self.channel not in CHANNEL_KINDS:
            raise ValueError(f"unknown channel kind {self.channel!r}")
        if self.input_state is None:
            self.input_state = default_input(self.layout)
        if self.input_state.num_qubits != self.layout.num_blocks:
            raise ValueError("input state must have one qubit per block")
        n = self.layout.num_qubits
        start = embed(self.input_state, self.layout.data_qubits, n)
        self.encoded = encode(start, self.layout)
        self.decoder = build_decoder(self.layout)
        self.sandwich = phaseflip_sandwich(self.layout)

    @property
    def num_qubits(self) -> int:
        return self.layout.num_qubits

    def decoded_state(self, mask: int) -> StateVector:
        noisy = apply_flip_pattern(self.encoded, mask, self.channel, self.sandwich)
        return apply_gates(noisy, self.decoder)

    def overlap(self, mask: int) -> float:
        return reduced_overlap(self.decoded_state(mask), self.input_state, self.layout.data_qubits)


@lru_cache(maxsize=64)
def cached_pipeline(layout: CodeLayout, channel: str = "bitflip") -> RepetitionPipeline:
    """Shared pipeline for the default input; treat it as read-only."""
    return RepetitionPipeline(layout, channel)


def enumerate_patterns(num_qubits: int, score: Callable[[int], float]) -> np.ndarray:
    """Score every flip pattern 0 .. 2**num_qubits - 1, in order, snapping float noise."""
    return np.array([snap_score(score(m)) for m in range(1 << num_qubits)], dtype=float)


@lru_cache(maxsize=None)
def _popcounts(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    return np.array([bin(i).count("1") for i in idx])


def weighted_fidelity(scores: np.ndarray, p: float) -> float:
    """sqrt(sum_m p^|m| (1-p)^(n-|m|) * score(m)), summed in pattern order.

    The sum is accumulated as one minus the weighted infidelity, so a
    pipeline that scores 1 on every pattern gives exactly 1.
    """
    n = int(scores.size).bit_length() - 1
    w = _popcounts(n)
    probs = p ** w * (1 - p) ** (n - w)
    return sqrt(min(1.0, max(0.0, 1.0 - float(np.dot(probs, 1.0 - scores)))))


def snap_score(v: float, tol: float = 1e-12) -> float:
    """Round an overlap within ``tol`` of 0 or 1 to that value."""
    if abs(v - 1.0) < tol:
        return 1.0
    if abs(v) < tol:
        return 0.0
    return v


def coefficients_from_scores(scores: np.ndarray) -> tuple[float, ...]:
    """Per-weight sum of scores; integers whenever every score is 0 or 1."""
    n = int(scores.size).bit_length() - 1
    w = _popcounts(n)
    f = np.zeros(n + 1)
    np.add.at(f, w, scores)
    return tuple(int(round(c)) if isclose(c, round(c), abs_tol=1e-9) else float(c) for c in f)


def enumerate_fidelity(layout: CodeLayout, p: float, channel: str = "bitflip",
                       input_state: StateVector | None = None) -> float:
    pipe = RepetitionPipeline(layout, channel, input_state)
    return weighted_fidelity(enumerate_patterns(pipe.num_qubits, pipe.overlap), p)


@dataclass(frozen=True)
class CoefficientReport:
    k: int
    kind: str
    enumerated: tuple
    published: tuple
    counted: tuple

    @property
    def mismatches(self) -> list[tuple[int, int, float]]:
        """(i, published value, enumerated value) wherever they disagree."""
        return [(i, a, b) for i, (a, b) in enumerate(zip(self.published, self.enumerated)) if a != b]

    def lines(self) -> list[str]:
        out = [f"k={self.k} {self.kind}: enumerated f = {list(self.enumerated)}",
               f"k={self.k} {self.kind}: published f  = {list(self.published)}"]
        if self.mismatches:
            for i, a, b in self.mismatches:
                out.append(f"  mismatch at i={i}: published {a}, enumerated {b}")
        else:
            out.append("  published coefficients agree with enumeration")
        return out


def adjudicate_coefficients(k: int, kind: str = "bell") -> CoefficientReport:
    """Compare the published coefficient table with exhaustive pipeline enumeration."""
    scenario = "bipartite-bell" if kind == "bell" else "bipartite-product"
    pipe = RepetitionPipeline(CodeLayout(k, scenario))
    scores = enumerate_patterns(pipe.num_qubits, pipe.overlap)
    return CoefficientReport(k, kind, coefficients_from_scores(scores),
                             published_coefficients(k, kind), counted_coefficients(k, kind))


def density_matrix_fidelity(layout: CodeLayout, p: float, channel: str = "bitflip",
                            input_state: StateVector | None = None) -> float:
    """Same pipeline evaluated on the density matrix with the full Kraus channel.

    Independent of the per-pattern enumeration; practical up to about 8 qubits.
    """
    pipe = RepetitionPipeline(layout, channel, input_state)
    n = layout.num_qubits
    rho = pipe.encoded.to_density_matrix()
    if channel == "phaseflip":
        rho = apply_gates(rho, pipe.sandwich)
    rho = apply_channel(rho, make_channel(ChannelModel(channel, p, n)), tuple(range(n)))
    if channel == "phaseflip":
        rho = apply_gates(rho, pipe.sandwich)
    rho = apply_gates(rho, pipe.decoder)
    return fidelity(pipe.input_state, partial_trace(rho, layout.data_qubits))
