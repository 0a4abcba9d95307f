"""Dense statevector / density-matrix simulator.

Qubits are numbered from 0 and little-endian: qubit ``q`` is bit ``q`` of the
basis-state index.  Multi-qubit gate matrices follow the same convention over
their own qubit tuple, i.e. ``qubits[0]`` is the least significant bit of the
matrix index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

MAX_QUBITS = 16
_ATOL = 1e-12

SQRT1_2 = 1 / np.sqrt(2)
I2 = np.eye(2, dtype=complex)
H_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)
Y_MATRIX = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z_MATRIX = np.array([[1, 0], [0, -1]], dtype=complex)


def _num_qubits_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if n < 1 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the dense cap of {MAX_QUBITS}")
    return n


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state on ``num_qubits`` qubits."""

    amplitudes: np.ndarray
    num_qubits: int = field(init=False)

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "num_qubits", _num_qubits_for(amps.size))
        norm = np.vdot(amps, amps).real
        if abs(norm - 1) > _ATOL:
            raise ValueError(f"state is not normalized (|psi|^2 = {norm!r})")

    @classmethod
    def basis(cls, bits: Sequence[int] | str) -> "StateVector":
        """Computational basis state; ``bits[q]`` is the value of qubit ``q``."""
        if isinstance(bits, str):
            bits = [int(b) for b in bits]
        amps = np.zeros(1 << len(bits), dtype=complex)
        amps[basis_index(bits)] = 1
        return cls(amps)

    @classmethod
    def zeros(cls, num_qubits: int) -> "StateVector":
        return cls.basis([0] * num_qubits)

    @classmethod
    def from_bloch(cls, theta: float, phi: float) -> "StateVector":
        return cls([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])

    def tensor(self, other: "StateVector") -> "StateVector":
        """``self`` occupies the low qubits, ``other`` the high ones."""
        return StateVector(np.kron(other.amplitudes, self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray
    num_qubits: int = field(init=False)

    def __post_init__(self):
        rho = _frozen(self.entries)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density matrix must be square")
        object.__setattr__(self, "entries", rho)
        object.__setattr__(self, "num_qubits", _num_qubits_for(rho.shape[0]))
        if not np.allclose(rho, rho.conj().T, rtol=0, atol=_ATOL):
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(rho)
        if abs(tr - 1) > _ATOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise ValueError("density matrix is not positive semidefinite")

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityMatrix":
        return state.to_density_matrix()

    @classmethod
    def maximally_mixed(cls, num_qubits: int) -> "DensityMatrix":
        d = 1 << num_qubits
        return cls(np.eye(d) / d)

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(np.kron(other.entries, self.entries))


def basis_index(bits: Sequence[int]) -> int:
    return sum(int(b) << q for q, b in enumerate(bits))


def as_density_matrix(state: StateVector | DensityMatrix) -> DensityMatrix:
    if isinstance(state, StateVector):
        return state.to_density_matrix()
    return state


# --------------------------------------------------------------------- gates


def is_unitary(u: np.ndarray, atol: float = _ATOL) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(
        u.conj().T @ u, np.eye(u.shape[0]), rtol=0, atol=atol
    )


@dataclass(frozen=True, eq=False)
class Gate:
    """A gate acting on ``targets``, optionally conditioned on ``controls``.

    ``ctrl_state[i]`` is the value control ``controls[i]`` must hold for the
    gate to fire (1 by default).  ``matrix`` acts on ``targets`` with
    ``targets[0]`` as its least significant bit.
    """

    name: str
    targets: tuple[int, ...]
    matrix: np.ndarray
    controls: tuple[int, ...] = ()
    ctrl_state: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        if not self.ctrl_state:
            object.__setattr__(self, "ctrl_state", (1,) * len(self.controls))
        object.__setattr__(self, "ctrl_state", tuple(int(s) for s in self.ctrl_state))
        m = _frozen(self.matrix)
        object.__setattr__(self, "matrix", m)
        if len(self.ctrl_state) != len(self.controls):
            raise ValueError("ctrl_state must match controls")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"gate {self.name} has repeated qubits {self.qubits}")
        if min(self.qubits) < 0:
            raise ValueError("qubit indices must be non-negative")
        if m.shape != (1 << len(self.targets),) * 2:
            raise ValueError(f"matrix shape {m.shape} does not match {len(self.targets)} targets")
        if not is_unitary(m):
            raise ValueError(f"gate {self.name} is not unitary")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def local_matrix(self) -> np.ndarray:
        """Full matrix over ``self.qubits`` (controls first, little-endian)."""
        nc = len(self.controls)
        dim = 1 << (nc + len(self.targets))
        full = np.eye(dim, dtype=complex)
        on = basis_index(self.ctrl_state)
        idx = [on | (t << nc) for t in range(1 << len(self.targets))]
        full[np.ix_(idx, idx)] = self.matrix
        return full


@lru_cache(maxsize=None)
def H(q: int) -> Gate:
    return Gate("H", (q,), H_MATRIX)


@lru_cache(maxsize=None)
def X(q: int) -> Gate:
    return Gate("X", (q,), X_MATRIX)


@lru_cache(maxsize=None)
def Y(q: int) -> Gate:
    return Gate("Y", (q,), Y_MATRIX)


@lru_cache(maxsize=None)
def Z(q: int) -> Gate:
    return Gate("Z", (q,), Z_MATRIX)


@lru_cache(maxsize=None)
def CNOT(control: int, target: int) -> Gate:
    return Gate("CNOT", (target,), X_MATRIX, (control,))


def controlled(controls: Sequence[int], target: int | Sequence[int], unitary,
               ctrl_state: Sequence[int] = ()) -> Gate:
    targets = (target,) if isinstance(target, (int, np.integer)) else tuple(target)
    return Gate(f"C{len(controls)}U", targets, unitary, tuple(controls), tuple(ctrl_state))


def raw_unitary(matrix, targets: Sequence[int]) -> Gate:
    return Gate("U", tuple(targets), matrix)


def _apply_local(tensor: np.ndarray, u: np.ndarray, axes: list[int]) -> np.ndarray:
    """Contract ``u`` into ``tensor``; ``axes`` lists tensor axes msb-first."""
    m = len(axes)
    ut = u.reshape((2,) * (2 * m))
    out = np.tensordot(ut, tensor, axes=(list(range(m, 2 * m)), axes))
    return np.moveaxis(out, list(range(m)), axes)


def _state_axes(n: int, qubits: Sequence[int], offset: int = 0) -> list[int]:
    return [offset + n - 1 - q for q in reversed(qubits)]


@lru_cache(maxsize=4096)
def _controlled_pairs(n: int, controls: tuple, ctrl_state: tuple, target: int):
    idx = np.arange(1 << n)
    mask = np.ones(idx.size, dtype=bool)
    for c, s in zip(controls, ctrl_state):
        mask &= ((idx >> c) & 1) == s
    mask &= ((idx >> target) & 1) == 0
    i0 = idx[mask]
    return i0, i0 | (1 << target)


def _check_range(gate: Gate, n: int):
    if max(gate.qubits) >= n:
        raise IndexError(f"gate {gate.name} on {gate.qubits} but state has {n} qubits")


def apply_gate(state, gate: Gate):
    """Return ``U|psi>`` or ``U rho U^dagger``."""
    n = state.num_qubits
    _check_range(gate, n)
    if isinstance(state, StateVector):
        psi = state.amplitudes
        if len(gate.targets) == 1:
            i0, i1 = _controlled_pairs(n, gate.controls, gate.ctrl_state, gate.targets[0])
            u = gate.matrix
            out = psi.copy()
            a, b = psi[i0], psi[i1]
            out[i0] = u[0, 0] * a + u[0, 1] * b
            out[i1] = u[1, 0] * a + u[1, 1] * b
            return StateVector(out)
        t = psi.reshape((2,) * n)
        t = _apply_local(t, gate.local_matrix(), _state_axes(n, gate.qubits))
        return StateVector(t.reshape(-1))
    rho = _conjugate(state.entries, gate.local_matrix(), gate.qubits, n)
    return DensityMatrix(rho)


def apply_gates(state, gates: Sequence[Gate]):
    for g in gates:
        state = apply_gate(state, g)
    return state


def _conjugate(rho: np.ndarray, u: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    t = rho.reshape((2,) * (2 * n))
    t = _apply_local(t, u, _state_axes(n, qubits))
    t = _apply_local(t, u.conj(), _state_axes(n, qubits, offset=n))
    return t.reshape(1 << n, 1 << n)


# --------------------------------------------------------------- bell states

BELL_LABELS = {"phi+": (0, 0), "phi-": (0, 1), "psi+": (1, 0), "psi-": (1, 1)}


def _bell_bits(label) -> tuple[int, int]:
    if isinstance(label, str):
        try:
            return BELL_LABELS[label]
        except KeyError:
            raise ValueError(f"unknown Bell label {label!r}") from None
    m, n = label
    return int(m), int(n)


def bell_transform(source, target, qubit: int = 1) -> list[Gate]:
    """Single-qubit gates on Bob's ``qubit`` taking Bell state ``source`` to ``target``.

    Labels are ``"phi+"``, ``"phi-"``, ``"psi+"``, ``"psi-"`` or ``(m, n)`` bit pairs.
    The result is exact up to a global phase.
    """
    ms, ns = _bell_bits(source)
    mt, nt = _bell_bits(target)
    gates = []
    if ns ^ nt:
        gates.append(Z(qubit))
    if ms ^ mt:
        gates.append(X(qubit))
    return gates


def prepare_bell(m: int, n: int) -> StateVector:
    """(|0>|m> + (-1)^n |1>|1+m>)/sqrt2 via H, CNOT and local Pauli fix-ups."""
    if m not in (0, 1) or n not in (0, 1):
        raise ValueError("m and n must be bits")
    gates = [H(0), CNOT(0, 1), *bell_transform("phi+", (m, n))]
    return apply_gates(StateVector.zeros(2), gates)


# ------------------------------------------------------------------ channels


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """CPTP map given as weighted operators ``E_k = weight_k * U_k``.

    Operators may be matrices or any object exposing ``to_matrix()``
    (e.g. :class:`bellqec.pauli.PauliString`).
    """

    operators: tuple
    arity: int = field(init=False)

    def __post_init__(self):
        ops = tuple((float(w), op) for w, op in self.operators)
        if not ops:
            raise ValueError("channel needs at least one operator")
        object.__setattr__(self, "operators", ops)
        mats = self.kraus_matrices()
        dim = mats[0].shape[0]
        object.__setattr__(self, "arity", _num_qubits_for(dim))
        total = sum(e.conj().T @ e for e in mats)
        if not np.allclose(total, np.eye(dim), rtol=0, atol=1e-10):
            raise ValueError("Kraus operators violate completeness sum E^dag E = I")

    def kraus_matrices(self) -> list[np.ndarray]:
        out = []
        for w, op in self.operators:
            m = op.to_matrix() if hasattr(op, "to_matrix") else np.asarray(op, dtype=complex)
            out.append(w * m)
        return out


def apply_channel(rho: DensityMatrix, channel: KrausChannel, targets: Sequence[int]) -> DensityMatrix:
    """sum_k E_k rho E_k^dagger with the channel acting on ``targets``."""
    targets = tuple(targets)
    n = rho.num_qubits
    if len(targets) != channel.arity:
        raise ValueError(f"channel acts on {channel.arity} qubits, got targets {targets}")
    if len(set(targets)) != len(targets) or min(targets) < 0 or max(targets) >= n:
        raise IndexError(f"bad channel targets {targets} for {n} qubits")
    out = np.zeros_like(rho.entries)
    for e in channel.kraus_matrices():
        out += _conjugate(rho.entries, e, targets, n)
    return DensityMatrix(out)


# ------------------------------------------------------------------ analysis


def fidelity(reference: StateVector, rho) -> float:
    """sqrt(<psi|rho|psi>); a pure ``rho`` may be passed as a StateVector."""
    if isinstance(rho, StateVector):
        if rho.num_qubits != reference.num_qubits:
            raise ValueError("dimension mismatch")
        return float(np.sqrt(min(1.0, abs(reference.overlap(rho)) ** 2)))
    if rho.num_qubits != reference.num_qubits:
        raise ValueError("dimension mismatch")
    psi = reference.amplitudes
    val = np.vdot(psi, rho.entries @ psi).real
    return float(np.sqrt(min(1.0, max(0.0, val))))


def _trace_out(t: np.ndarray, n: int, keep: Sequence[int]) -> np.ndarray:
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    rows = [letters[i] for i in range(n)]
    cols = [letters[n + i] if (n - 1 - i) in keep else rows[i] for i in range(n)]
    out = [rows[i] for i in range(n) if (n - 1 - i) in keep]
    out += [cols[i] for i in range(n) if (n - 1 - i) in keep]
    return np.einsum(f"{''.join(rows)}{''.join(cols)}->{''.join(out)}", t)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on ``keep``; kept qubits are renumbered in ascending order."""
    n = rho.num_qubits
    keep = sorted(set(int(q) for q in keep))
    if not keep:
        raise ValueError("keep must name at least one qubit")
    if keep[0] < 0 or keep[-1] >= n:
        raise IndexError(f"keep {keep} out of range for {n} qubits")
    if len(keep) == n:
        return rho
    t = _trace_out(rho.entries.reshape((2,) * (2 * n)), n, keep)
    d = 1 << len(keep)
    return DensityMatrix(t.reshape(d, d))


def reduced_overlap(state: StateVector, reference: StateVector, keep: Sequence[int]) -> float:
    """<ref| Tr_{rest}(|psi><psi|) |ref> without forming the density matrix.

    ``reference`` lives on ``keep`` with ``keep[0]`` as its qubit 0.
    """
    n = state.num_qubits
    keep = list(keep)
    rest = [q for q in range(n) if q not in keep]
    t = state.amplitudes.reshape((2,) * n)
    # axes ordered (keep msb-first..., rest msb-first...)
    order = _state_axes(n, keep) + _state_axes(n, rest)
    mat = np.transpose(t, order).reshape(1 << len(keep), -1)
    proj = reference.amplitudes.conj() @ mat
    return float(np.vdot(proj, proj).real)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-sum lambda log2 lambda, in bits."""
    ev = np.linalg.eigvalsh(rho.entries)
    ev = np.where((ev < 0) & (ev >= -1e-10), 0.0, ev)
    ev = ev[ev > 0]
    return float(max(0.0, -np.sum(ev * np.log2(ev))))


def binary_entropy(p: float) -> float:
    if p in (0, 1):
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


class EntropyReport(NamedTuple):
    S_A: float
    S_B: float
    S_AB: float
    S_A_given_B: float
    I_AB: float


def mutual_information(rho_ab: DensityMatrix, partition) -> EntropyReport:
    """Marginal, joint and conditional entropies plus mutual information.

    ``partition`` is ``(A qubits, B qubits)`` and must cover every qubit once.
    """
    a, b = (sorted(int(q) for q in part) for part in partition)
    if set(a) & set(b):
        raise ValueError("partition parts overlap")
    if sorted(a + b) != list(range(rho_ab.num_qubits)) or not a or not b:
        raise ValueError("partition must cover all qubits with two nonempty parts")
    s_a = von_neumann_entropy(partial_trace(rho_ab, a))
    s_b = von_neumann_entropy(partial_trace(rho_ab, b))
    s_ab = von_neumann_entropy(rho_ab)
    return EntropyReport(s_a, s_b, s_ab, s_ab - s_b, s_a + s_b - s_ab)
