"""Symbolic Pauli strings, stabilizer generator sets and syndromes.

A string is stored as an x-bitmask, a z-bitmask and a phase exponent so that

    P = i**phase * (letter_0 (x) letter_1 (x) ...)

with letters I (0,0), X (1,0), Z (0,1), Y (1,1) read from the (x, z) bits.
Bit ``q`` of the masks is qubit ``q``; the text form lists qubit 0 first
(``"XIIIII"`` is X on the first qubit).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Iterable, Sequence

import numpy as np

from .core import I2, X_MATRIX, Y_MATRIX, Z_MATRIX, Gate, H, StateVector, Z, apply_gates, controlled

_LETTERS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {v: k for k, v in _LETTERS.items()}
_TEXT_RE = re.compile(r"^([+-]?)(i?)([IXYZ]+)$")
_PHASE_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_MATS = {"I": I2, "X": X_MATRIX, "Y": Y_MATRIX, "Z": Z_MATRIX}


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    num_qubits: int
    x: int = 0
    z: int = 0
    phase: int = 0  # exponent of i, mod 4

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("Pauli string needs at least one qubit")
        full = (1 << self.num_qubits) - 1
        if self.x & ~full or self.z & ~full:
            raise ValueError("bitmask exceeds num_qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # ---------------------------------------------------------- constructors
    @classmethod
    def from_str(cls, text: str) -> "PauliString":
        """Parse ``"XIIIII"``, ``"-ZZI"``, ``"+iXY"`` (whitespace ignored)."""
        m = _TEXT_RE.match("".join(text.split()))
        if not m:
            raise ValueError(f"not a Pauli string: {text!r}")
        sign, imag, s = m.groups()
        phase = (2 if sign == "-" else 0) + (1 if imag else 0)
        x = z = 0
        for q, c in enumerate(s):
            bx, bz = _BITS[c]
            x |= bx << q
            z |= bz << q
        return cls(len(s), x, z, phase)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliString":
        bx, bz = _BITS[letter]
        return cls(n, bx << qubit, bz << qubit)

    @classmethod
    def from_sites(cls, n: int, letter: str, qubits: Iterable[int]) -> "PauliString":
        """``letter`` on every qubit in ``qubits`` (0-based), identity elsewhere."""
        mask = 0
        for q in qubits:
            if not 0 <= q < n:
                raise IndexError(f"qubit {q} out of range for {n}")
            mask |= 1 << q
        bx, bz = _BITS[letter]
        return cls(n, mask if bx else 0, mask if bz else 0)

    @classmethod
    def bitflips(cls, n: int, mask: int) -> "PauliString":
        return cls(n, x=mask)

    @classmethod
    def phaseflips(cls, n: int, mask: int) -> "PauliString":
        return cls(n, z=mask)

    # ------------------------------------------------------------ properties
    @property
    def letters(self) -> str:
        return "".join(
            _LETTERS[(self.x >> q) & 1, (self.z >> q) & 1] for q in range(self.num_qubits)
        )

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def support(self) -> list[int]:
        m = self.x | self.z
        return [q for q in range(self.num_qubits) if (m >> q) & 1]

    @property
    def sign(self) -> complex:
        return 1j ** self.phase

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_bitflip(self) -> bool:
        return self.z == 0

    def unsigned(self) -> "PauliString":
        return PauliString(self.num_qubits, self.x, self.z)

    def __str__(self) -> str:
        prefix = _PHASE_TEXT[self.phase] if self.phase else ""
        return prefix + self.letters

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.num_qubits, self.x, self.z, self.phase + 2)

    def restrict(self, qubits: Iterable[int]) -> "PauliString":
        """Same length, identity outside ``qubits``; the phase is dropped."""
        mask = 0
        for q in qubits:
            mask |= 1 << q
        return PauliString(self.num_qubits, self.x & mask, self.z & mask)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix with the little-endian qubit ordering of :mod:`bellqec.core`."""
        out = np.array([[1]], dtype=complex)
        for c in self.letters:  # qubit 0 first, so it ends up least significant
            out = np.kron(_MATS[c], out)
        return self.sign * out

    def apply(self, state: StateVector) -> StateVector:
        """P|psi> using bit operations on basis indices."""
        if state.num_qubits != self.num_qubits:
            raise ValueError("length mismatch")
        return StateVector(_apply_to_amplitudes(self, state.amplitudes))


def _apply_to_amplitudes(p: PauliString, amps: np.ndarray) -> np.ndarray:
    idx = np.arange(amps.size)
    # letter = i^{x.z} X^x Z^z, and X^x Z^z |b> = (-1)^{z.b} |b ^ x>
    parity = np.zeros(idx.size, dtype=np.int64)
    zz = p.z
    q = 0
    while zz:
        if zz & 1:
            parity ^= (idx >> q) & 1
        zz >>= 1
        q += 1
    coeff = (1j ** ((p.phase + _popcount(p.x & p.z)) % 4)) * (1 - 2 * parity)
    out = np.empty_like(amps)
    out[idx ^ p.x] = coeff * amps
    return out


def _check_lengths(a: PauliString, b: PauliString):
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"length mismatch: {a.num_qubits} vs {b.num_qubits}")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact product ``a * b`` including the phase."""
    _check_lengths(a, b)
    # rewrite each as i^e X^x Z^z, multiply, then return to letter form
    e = a.phase + _popcount(a.x & a.z) + b.phase + _popcount(b.x & b.z)
    e += 2 * _popcount(a.z & b.x)
    x, z = a.x ^ b.x, a.z ^ b.z
    return PauliString(a.num_qubits, x, z, e - _popcount(x & z))


def commutes(a: PauliString, b: PauliString) -> int:
    """+1 if ``a`` and ``b`` commute, -1 if they anticommute (symplectic product)."""
    _check_lengths(a, b)
    return -1 if (_popcount(a.x & b.z) + _popcount(a.z & b.x)) & 1 else 1


@dataclass(frozen=True)
class Syndrome:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (-1, 1) for b in bits):
            raise ValueError(f"syndrome bits must be +-1, got {bits}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def parse(cls, text: str) -> "Syndrome":
        return cls(tuple(int(t) for t in text.replace(",", " ").split()))

    def __len__(self):
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    def __getitem__(self, i):
        return self.bits[i]

    def __str__(self):
        return " ".join(f"{b:+d}" for b in self.bits)


class GeneratorSet:
    """Ordered stabilizer generators, validated on construction.

    Raises ValueError unless every generator is Hermitian with phase +1 or -1,
    all pairs commute, and -I is not in the generated group.
    """

    def __init__(self, generators: Sequence[PauliString | str], labels: Sequence[str] | None = None):
        gens = tuple(g if isinstance(g, PauliString) else PauliString.from_str(g) for g in generators)
        if not gens:
            raise ValueError("empty generator set")
        n = gens[0].num_qubits
        for g in gens:
            if g.num_qubits != n:
                raise ValueError("generators have different lengths")
            if not g.is_hermitian:
                raise ValueError(f"generator {g} is not Hermitian")
            sq = multiply(g, g)
            if not (sq.is_identity and sq.phase == 0):
                raise ValueError(f"generator {g} does not square to +I")
        for i, a in enumerate(gens):
            for b in gens[i + 1:]:
                if commutes(a, b) != 1:
                    raise ValueError(f"generators {a} and {b} anticommute")
        _check_no_minus_identity(gens)
        self.generators = gens
        self.num_qubits = n
        self.labels = tuple(labels) if labels else tuple(str(g) for g in gens)

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __getitem__(self, i):
        return self.generators[i]

    def __repr__(self):
        return f"GeneratorSet([{', '.join(self.labels)}])"


def _check_no_minus_identity(gens: Sequence[PauliString]):
    # Gaussian elimination over the symplectic vectors, carrying phases.  A
    # generator that reduces to a pure phase is a dependency; it must be +I.
    basis: dict[int, PauliString] = {}
    for g in gens:
        r = g
        while not r.is_identity:
            vec = r.x | (r.z << r.num_qubits)
            pivot = vec.bit_length() - 1
            if pivot not in basis:
                basis[pivot] = r
                break
            r = multiply(r, basis[pivot])
        else:
            if r.phase != 0:
                raise ValueError("generator set produces -I")


def syndrome(error: PauliString, gens: GeneratorSet | Sequence[PauliString]) -> Syndrome:
    return Syndrome(tuple(commutes(error, g) for g in gens))


def measure_syndrome_circuit(state: StateVector, stabilizer: PauliString, rng=None):
    """Ancilla-assisted measurement of ``stabilizer``.

    Appends one ancilla in |0>, applies H, the stabilizer controlled on the
    ancilla, H again and measures the ancilla in Z.  Returns ``(outcome,
    post_state)`` where ``post_state`` is the data register collapsed onto the
    ``outcome`` eigenspace.  A random outcome is only drawn (from ``rng``) when
    the state is not already an eigenstate.
    """
    if not stabilizer.is_hermitian:
        raise ValueError(f"stabilizer {stabilizer} is not Hermitian")
    if stabilizer.num_qubits != state.num_qubits:
        raise ValueError("stabilizer length does not match the state")
    n = state.num_qubits
    anc = n
    full = StateVector(np.concatenate([state.amplitudes, np.zeros_like(state.amplitudes)]))
    circuit = [H(anc), *controlled_pauli(stabilizer, anc), H(anc)]
    amps = apply_gates(full, circuit).amplitudes
    branch0, branch1 = amps[: 1 << n], amps[1 << n:]
    p0 = float(np.vdot(branch0, branch0).real)
    p1 = float(np.vdot(branch1, branch1).real)
    if p1 < 1e-12:
        outcome = 1
    elif p0 < 1e-12:
        outcome = -1
    else:
        rng = np.random.default_rng() if rng is None else rng
        outcome = 1 if rng.random() < p0 else -1
    kept, prob = (branch0, p0) if outcome == 1 else (branch1, p1)
    return outcome, StateVector(kept / np.sqrt(prob))


def controlled_pauli(p: PauliString, control: int) -> list[Gate]:
    """Gates for |0><0| (x) I + |1><1| (x) P, one controlled letter per qubit."""
    return list(_controlled_pauli(p, control))


@lru_cache(maxsize=4096)
def _controlled_pauli(p: PauliString, control: int) -> tuple[Gate, ...]:
    if not p.is_hermitian:
        raise ValueError(f"{p} is not Hermitian")
    gates = [Z(control)] if p.phase == 2 else []
    for q, c in enumerate(p.letters):
        if c != "I":
            gates.append(controlled([control], q, _MATS[c]))
    return tuple(gates)


def equivalent_mod_logical_X(e1: PauliString, e2: PauliString, n: int | None = None) -> bool:
    """True iff bit-flip strings ``e1`` and ``e2`` differ by I or by X on every qubit."""
    _check_lengths(e1, e2)
    n = e1.num_qubits if n is None else n
    if n != e1.num_qubits:
        raise ValueError("n does not match the string length")
    if not (e1.is_bitflip and e2.is_bitflip):
        raise ValueError("equivalence is defined for bit-flip strings only")
    diff = e1.x ^ e2.x
    return diff == 0 or diff == (1 << n) - 1


def product(strings: Iterable[PauliString]) -> PauliString:
    return reduce(multiply, strings)
