"""Alice/Bob correction of an encoded Bell pair using only local operations.

The encoded pair's stabilizer can be generated by checks local to each party
plus one boundary check ``Z_{2k+1} Z_{2k+2}`` straddling the cut and the
all-X logical.  Every bit flip commutes with the all-X string, and the
boundary syndrome factors as ``m1 * m2``, where each ``m`` is whether the
party's share of the error commutes with its half of the boundary check.
Exchanging local syndromes plus that one bit per party is enough to rebuild
the full syndrome on both sides.

The ``m`` bits are read from the Pauli frame (the known error pattern), which
stands in for an ideal non-demolition measurement; the local checks are
measured on the statevector.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .core import X, Gate, apply_gates, reduced_overlap
from .pauli import (
    GeneratorSet,
    PauliString,
    Syndrome,
    commutes,
    controlled_pauli,
    measure_syndrome_circuit,
    syndrome,
)
from .repetition import CodeLayout, apply_flip_pattern, cached_pipeline
from .stabilizer import bell_code_generators, code_size, rotation_correct

PARTIES = ("alice", "bob")


class LocalityViolation(RuntimeError):
    pass


class LocalBasis(NamedTuple):
    alice: tuple[PauliString, ...]
    bob: tuple[PauliString, ...]
    boundary: PauliString
    logical: PauliString

    def as_generator_set(self) -> GeneratorSet:
        return GeneratorSet([*self.alice, *self.bob, self.boundary, self.logical])


def _zz(n, a, b):
    return PauliString.from_sites(n, "Z", (a, b))


def split_generators(k: int) -> LocalBasis:
    """Locality-respecting generators of the encoded Bell pair.

    Alice: Z1Z2 .. Z1Z_{2k+1}; Bob: the nearest-neighbour chain
    Z_{2k+2}Z_{2k+3}, ..., Z_{n-1}Z_n; then the boundary check and all-X.
    """
    n = code_size(k)
    b = 2 * k + 1
    alice = tuple(_zz(n, 0, j) for j in range(1, b))
    bob = tuple(_zz(n, j, j + 1) for j in range(b, n - 1))
    return LocalBasis(alice, bob, _zz(n, b - 1, b), PauliString.from_sites(n, "X", range(n)))


@dataclass(frozen=True)
class ClassicalMessage:
    sender: str
    bits: tuple[int, ...]
    round: int = 0

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if any(b not in (-1, 1) for b in self.bits):
            raise ValueError("message bits must be +-1")
        if self.sender not in PARTIES:
            raise ValueError(f"unknown sender {self.sender!r}")

    def to_json(self, **extra) -> str:
        return json.dumps({**extra, "round": self.round, "sender": self.sender, "bits": list(self.bits)})


@dataclass
class PartyView:
    party: str
    qubits: tuple[int, ...]
    generators: tuple[PauliString, ...]
    boundary_half: PauliString
    received: list[ClassicalMessage] = field(default_factory=list)

    def __post_init__(self):
        allowed = set(self.qubits)
        for g in self.generators:
            if not set(g.support) <= allowed:
                raise LocalityViolation(f"{g} is not local to {self.party}")


def make_parties(k: int) -> tuple[PartyView, PartyView]:
    layout = CodeLayout(k, "bipartite-bell")
    basis = split_generators(k)
    n = layout.num_qubits
    b = layout.block_size
    alice = PartyView("alice", layout.alice, basis.alice, PauliString.single(n, b - 1, "Z"))
    bob = PartyView("bob", layout.bob, basis.bob, PauliString.single(n, b, "Z"))
    return alice, bob


class LocalityAudit:
    """Rejects any gate that touches qubits outside the acting party's share.

    ``extra`` names scratch qubits (e.g. a syndrome ancilla) held by that party.
    """

    def __init__(self):
        self.log: list[tuple[str, str, tuple[int, ...]]] = []

    def check(self, party: PartyView, gates: Sequence[Gate], extra: Sequence[int] = ()):
        allowed = set(party.qubits) | set(extra)
        for g in gates:
            if not set(g.qubits) <= allowed:
                raise LocalityViolation(f"{party.party} cannot apply {g.name} on {g.qubits}")
            self.log.append((party.party, g.name, g.qubits))
        return list(gates)


def local_commutation_bit(party: PartyView, error: PauliString, boundary_half: PauliString | None = None) -> int:
    """Whether the party's share of ``error`` commutes with its boundary factor."""
    half = party.boundary_half if boundary_half is None else boundary_half
    if not set(half.support) <= set(party.qubits):
        raise LocalityViolation(f"{half} is not on {party.party}'s qubits")
    return commutes(error.restrict(party.qubits), half)


def combine_boundary_syndrome(m1: int, m2: int) -> int:
    if m1 not in (-1, 1) or m2 not in (-1, 1):
        raise ValueError("commutation bits must be +-1")
    return m1 * m2


def boundary_commutator_coefficient(m1: int, m2: int) -> int:
    """Scalar in [O1, O2] = (1+m1)(1+m2)(m2-m1) Z Z for O = {E, Z} observables."""
    return (1 + m1) * (1 + m2) * (m2 - m1)


def boundary_observables_commute(k: int, error: PauliString) -> bool:
    """Matrix check that {E, Z_{2k+1}} and {E, Z_{2k+2}} commute."""
    n = code_size(k)
    e = error.to_matrix()
    za = PauliString.single(n, 2 * k, "Z").to_matrix()
    zb = PauliString.single(n, 2 * k + 1, "Z").to_matrix()
    o1 = e @ za + za @ e
    o2 = e @ zb + zb @ e
    return bool(np.allclose(o1 @ o2 - o2 @ o1, 0, atol=1e-12))


def _symplectic(p: PauliString) -> int:
    return p.x | (p.z << p.num_qubits)


def translate_syndrome(bits: Sequence[int], source: Sequence[PauliString],
                       target: Sequence[PauliString]) -> Syndrome:
    """Syndrome against ``target`` from one against ``source`` (same group).

    Each target generator is written as a product of source generators by
    elimination over GF(2); its syndrome bit is the product of their bits.
    """
    rows: dict[int, tuple[int, int]] = {}  # pivot -> (vector, combination mask)
    for i, s in enumerate(source):
        vec, combo = _symplectic(s), 1 << i
        while vec:
            piv = vec.bit_length() - 1
            if piv not in rows:
                rows[piv] = (vec, combo)
                break
            vec ^= rows[piv][0]
            combo ^= rows[piv][1]
    out = []
    for t in target:
        vec, combo = _symplectic(t), 0
        while vec:
            piv = vec.bit_length() - 1
            if piv not in rows:
                raise ValueError(f"{t} is not generated by the source set")
            vec ^= rows[piv][0]
            combo ^= rows[piv][1]
        val = 1
        for i, b in enumerate(bits):
            if (combo >> i) & 1:
                val *= b
        out.append(val)
    return Syndrome(tuple(out))


@dataclass(frozen=True)
class ProtocolResult:
    transcript: tuple[ClassicalMessage, ...]
    corrections: dict
    fidelity: float
    syndrome: Syndrome | None
    audit_log: tuple = ()

    def transcript_jsonl(self, **extra) -> str:
        return "".join(m.to_json(**extra) + "\n" for m in self.transcript)


def _error_mask(error: PauliString, channel: str) -> int:
    if channel == "bitflip":
        if not error.is_bitflip:
            raise ValueError("bit-flip protocol expects an X-only error")
        return error.x
    if channel == "phaseflip":
        if error.x:
            raise ValueError("phase-flip protocol expects a Z-only error")
        return error.z
    raise ValueError(f"unknown channel kind {channel!r}")


def run_protocol(k: int, error: PauliString, classical_channel: bool = True,
                 channel: str = "bitflip", rng=None) -> ProtocolResult:
    """Corrupt the encoded pair with ``error`` and let each party recover locally.

    With the classical channel, each party measures its local checks, sends
    them with its boundary bit in one message, rebuilds the full syndrome and
    applies its share of the rotation-rule correction before decoding.
    Without it, each party only runs its repetition decoder.
    """
    layout = CodeLayout(k, "bipartite-bell")
    n = layout.num_qubits
    if error.num_qubits != n:
        raise ValueError(f"error must act on {n} qubits")
    mask = _error_mask(error, channel)
    pipe = cached_pipeline(layout, channel)
    alice, bob = make_parties(k)
    parties = (alice, bob)
    audit = LocalityAudit()
    for party in parties:
        audit.check(party, [g for g in pipe.sandwich if set(g.qubits) <= set(party.qubits)])
    state = apply_flip_pattern(pipe.encoded, mask, channel, pipe.sandwich)
    frame = PauliString(n, x=mask)  # sandwiched phase flips act as these bit flips

    transcript: list[ClassicalMessage] = []
    corrections = {p.party: PauliString(n) for p in parties}
    full = None
    if classical_channel:
        local_bits = {}
        for party in parties:
            bits = []
            for g in party.generators:
                audit.check(party, controlled_pauli(g, n), extra=(n,))
                outcome, state = measure_syndrome_circuit(state, g, rng)
                bits.append(outcome)
            m = local_commutation_bit(party, frame)
            local_bits[party.party] = bits
            transcript.append(ClassicalMessage(party.party, (*bits, m), round=0))
        alice.received.append(transcript[1])
        bob.received.append(transcript[0])

        basis = split_generators(k)
        source = [*basis.alice, *basis.bob, basis.boundary, basis.logical]
        canonical = bell_code_generators(k)
        assembled = []
        for party in parties:
            own = next(msg for msg in transcript if msg.sender == party.party)
            other = party.received[0]
            a_msg, b_msg = (own, other) if party.party == "alice" else (other, own)
            boundary = combine_boundary_syndrome(a_msg.bits[-1], b_msg.bits[-1])
            bits = [*a_msg.bits[:-1], *b_msg.bits[:-1], boundary, 1]
            assembled.append(translate_syndrome(bits, source, canonical))
        if assembled[0] != assembled[1]:
            raise RuntimeError("parties assembled different syndromes")
        full = assembled[0]
        corr = rotation_correct(full, k)
        for party in parties:
            share = corr.restrict(party.qubits)
            corrections[party.party] = share
            state = apply_gates(state, audit.check(party, [X(q) for q in share.support]))

    shares = {p.party: [] for p in parties}
    for g in pipe.decoder:
        owner = next((p for p in parties if set(g.qubits) <= set(p.qubits)), None)
        if owner is None:
            raise LocalityViolation(f"decoder gate {g.name} on {g.qubits} spans both parties")
        shares[owner.party].append(g)
    for party in parties:
        state = apply_gates(state, audit.check(party, shares[party.party]))

    ov = reduced_overlap(state, pipe.input_state, layout.data_qubits)
    return ProtocolResult(tuple(transcript), corrections, float(np.sqrt(min(1.0, ov))), full,
                          tuple(audit.log))


def canonical_syndrome_matches(k: int, error: PauliString) -> bool:
    """Check the local basis plus boundary bit reproduces the canonical syndrome."""
    basis = split_generators(k)
    alice, bob = make_parties(k)
    m = combine_boundary_syndrome(local_commutation_bit(alice, error), local_commutation_bit(bob, error))
    source = [*basis.alice, *basis.bob, basis.boundary, basis.logical]
    bits = [*syndrome(error, basis.alice), *syndrome(error, basis.bob), m, commutes(error, basis.logical)]
    return translate_syndrome(bits, source, bell_code_generators(k)) == syndrome(error, bell_code_generators(k))
