import itertools
import json

import pytest
from hypothesis import given, strategies as st

from bellqec.core import CNOT, X
from bellqec.pauli import GeneratorSet, PauliString, syndrome
from bellqec.repetition import closed_form_bipartite_fidelity, weighted_fidelity
from bellqec.longdistance import (
    ClassicalMessage,
    LocalityAudit,
    LocalityViolation,
    PartyView,
    boundary_commutator_coefficient,
    boundary_observables_commute,
    canonical_syndrome_matches,
    combine_boundary_syndrome,
    local_commutation_bit,
    make_parties,
    run_protocol,
    split_generators,
    translate_syndrome,
)
from bellqec.stabilizer import bell_code_generators, code_size


def P(s):
    return PauliString.from_str(s)


def test_split_generators_k1():
    b = split_generators(1)
    assert [str(g) for g in b.alice] == ["ZZIIII", "ZIZIII"]
    assert [str(g) for g in b.bob] == ["IIIZZI", "IIIIZZ"]
    assert str(b.boundary) == "IIZZII"
    assert str(b.logical) == "XXXXXX"
    assert isinstance(b.as_generator_set(), GeneratorSet)


@pytest.mark.parametrize("k", [1, 2])
def test_split_basis_same_partition(k):
    # same group: two errors share a local-basis syndrome iff they share a canonical one
    n = code_size(k)
    local = list(split_generators(k).as_generator_set())
    canon = bell_code_generators(k)
    seen = {}
    for m in range(1 << n):
        e = PauliString(n, x=m)
        a, c = syndrome(e, local), syndrome(e, canon)
        assert seen.setdefault(a, c) == c
    assert len(seen) == 1 << (n - 1)


def test_commutation_bits():
    alice, bob = make_parties(1)
    assert local_commutation_bit(alice, P("IIXIII")) == -1
    assert local_commutation_bit(alice, PauliString(6)) == 1
    assert local_commutation_bit(bob, P("IIIXII")) == -1
    assert local_commutation_bit(bob, P("IIXIII")) == 1
    with pytest.raises(LocalityViolation):
        local_commutation_bit(alice, P("IIIXII"), P("IIIZII"))


def test_combine_boundary():
    assert combine_boundary_syndrome(-1, -1) == 1
    assert combine_boundary_syndrome(-1, 1) == -1
    with pytest.raises(ValueError):
        combine_boundary_syndrome(0, 1)
    alice, bob = make_parties(1)
    e = P("IIXIII")
    m = combine_boundary_syndrome(local_commutation_bit(alice, e), local_commutation_bit(bob, e))
    assert m == -1 == syndrome(e, [P("IIZZII")])[0]


@pytest.mark.parametrize("k", [1, 2])
def test_boundary_bit_exhaustive(k):
    n = code_size(k)
    alice, bob = make_parties(k)
    boundary = split_generators(k).boundary
    for m in range(1 << n):
        e = PauliString(n, x=m)
        got = combine_boundary_syndrome(local_commutation_bit(alice, e), local_commutation_bit(bob, e))
        assert got == syndrome(e, [boundary])[0]
        if k == 1:
            assert canonical_syndrome_matches(k, e)


def test_commutator_identity():
    for m1, m2 in itertools.product((-1, 1), repeat=2):
        assert boundary_commutator_coefficient(m1, m2) == 0


@given(st.integers(0, 63))
def test_boundary_observables_commute_matrix(mask):
    assert boundary_observables_commute(1, PauliString(6, x=mask))


def test_translate_syndrome_roundtrip():
    src = [P("ZZI"), P("IZZ")]
    dst = [P("ZIZ"), P("ZZI")]
    assert tuple(translate_syndrome((-1, 1), src, dst)) == (-1, -1)
    with pytest.raises(ValueError):
        translate_syndrome((1, 1), src, [P("XII")])


def test_message_and_party_validation():
    with pytest.raises(ValueError):
        ClassicalMessage("alice", (1, 0))
    with pytest.raises(ValueError):
        ClassicalMessage("eve", (1,))
    with pytest.raises(LocalityViolation):
        PartyView("alice", (0, 1, 2), (P("IIZZII"),), P("IIZIII"))
    msg = ClassicalMessage("bob", (1, -1), round=0)
    assert json.loads(msg.to_json()) == {"round": 0, "sender": "bob", "bits": [1, -1]}


def test_audit_rejects_cross_party_gate():
    alice, _ = make_parties(1)
    audit = LocalityAudit()
    audit.check(alice, [X(0), CNOT(0, 2)])
    with pytest.raises(LocalityViolation):
        audit.check(alice, [CNOT(2, 3)])
    assert [entry[0] for entry in audit.log] == ["alice", "alice"]


def test_protocol_worked_example():
    res = run_protocol(1, P("XXIXII"))
    assert res.fidelity == pytest.approx(1, abs=1e-12)
    assert len(res.transcript) == 2
    assert [m.sender for m in res.transcript] == ["alice", "bob"]
    assert all(len(m.bits) == 3 for m in res.transcript)  # 2k local bits + m
    assert str(res.corrections["alice"]) == "XXIIII"
    assert str(res.corrections["bob"]) == "IIIXII"
    lines = res.transcript_jsonl().splitlines()
    assert [json.loads(line)["sender"] for line in lines] == ["alice", "bob"]


@pytest.mark.parametrize("k", [1, 2])
def test_protocol_all_patterns(k):
    n = code_size(k)
    for m in range(1 << n):
        res = run_protocol(k, PauliString(n, x=m))
        assert res.fidelity > 1 - 1e-12


def test_protocol_phaseflip():
    for m in range(64):
        res = run_protocol(1, PauliString(6, z=m), channel="phaseflip")
        assert res.fidelity > 1 - 1e-12
    with pytest.raises(ValueError):
        run_protocol(1, P("XIIIII"), channel="phaseflip")


def test_protocol_without_channel_matches_closed_form():
    import numpy as np

    scores = np.array([run_protocol(1, PauliString(6, x=m), classical_channel=False).fidelity ** 2
                       for m in range(64)])
    assert sum(s > 0.5 for s in scores) == 32
    for p in np.linspace(0, 1, 21):
        assert weighted_fidelity(scores, p) == pytest.approx(closed_form_bipartite_fidelity(1, p, "bell")[0],
                                                              abs=1e-12)
    res = run_protocol(1, PauliString(6, x=1), classical_channel=False)
    assert res.transcript == () and res.syndrome is None


def test_protocol_rejects_bad_error():
    with pytest.raises(ValueError):
        run_protocol(1, P("XXXX"))
    with pytest.raises(ValueError):
        run_protocol(1, P("YIIIII"))
