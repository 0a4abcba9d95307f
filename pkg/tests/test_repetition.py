from itertools import product
from math import comb, sqrt

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bellqec.core import StateVector, apply_gates, reduced_overlap
from bellqec.pauli import PauliString
from bellqec.repetition import (
    ChannelModel,
    CodeLayout,
    RepetitionPipeline,
    adjudicate_coefficients,
    build_decoder,
    build_encoder,
    closed_form_bipartite_fidelity,
    closed_form_single_fidelity,
    counted_coefficients,
    density_matrix_fidelity,
    embed,
    encode,
    enumerate_fidelity,
    majority_decode,
    make_channel,
    phaseflip_sandwich,
    published_coefficients,
    unencoded_arbitrary_report,
    unencoded_min_fidelity,
)


def test_layout_indices():
    lay = CodeLayout(1, "bipartite-bell")
    assert lay.num_qubits == 6
    assert lay.alice == (0, 1, 2) and lay.bob == (3, 4, 5)
    assert lay.data_qubits == (0, 3)
    assert lay.ancillas == (1, 2, 4, 5)
    with pytest.raises(ValueError):
        CodeLayout(0)
    with pytest.raises(ValueError):
        CodeLayout(1).bob


def test_channel_model_weights_sum_to_one():
    for n, p in ((3, 0.1), (6, 0.37)):
        m = ChannelModel("bitflip", p, n)
        assert sum(m.pattern_probability(x) for x in range(1 << n)) == pytest.approx(1, abs=1e-12)
        assert sum(comb(n, j) * p**j * (1 - p) ** (n - j) for j in range(n + 1)) == pytest.approx(1)
    with pytest.raises(ValueError):
        ChannelModel("bitflip", 1.2)
    with pytest.raises(ValueError):
        ChannelModel("depolarizing", 0.1)


# ------------------------------------------------------------------ encoder


def test_encoder_on_weighted_superposition():
    lay = CodeLayout(1)
    start = embed(StateVector([0.8, -0.6]), lay.data_qubits, 3)
    out = apply_gates(start, build_encoder(lay))
    expected = np.zeros(8)
    expected[0], expected[7] = 0.8, -0.6
    assert np.allclose(out.amplitudes, expected)


def test_encoder_bell_pair():
    lay = CodeLayout(1, "bipartite-bell")
    pipe = RepetitionPipeline(lay)
    expected = np.zeros(64)
    expected[0] = expected[63] = 1 / sqrt(2)
    assert np.allclose(pipe.encoded.amplitudes, expected)


def test_encode_rejects_dirty_ancilla():
    lay = CodeLayout(1)
    with pytest.raises(ValueError):
        encode(StateVector.basis([0, 1, 0]), lay)
    assert encode(StateVector.basis([1, 0, 0]), lay).amplitudes[7] == 1


# ------------------------------------------------------------------ decoder


def test_decoder_roundtrip_and_single_errors():
    lay = CodeLayout(1)
    psi = StateVector([0.8, -0.6])
    pipe = RepetitionPipeline(lay, input_state=psi)
    assert pipe.overlap(0) == pytest.approx(1)
    assert pipe.overlap(0b001) == pytest.approx(1)  # data qubit only
    assert pipe.overlap(0b111) < 1 - 1e-6  # whole block flipped


@pytest.mark.parametrize("k", [1, 2])
def test_decoder_corrects_up_to_k(k):
    lay = CodeLayout(k)
    theta, phi = 1.1, 0.4
    pipe = RepetitionPipeline(lay, input_state=StateVector.from_bloch(theta, phi))
    n = lay.num_qubits
    for mask in range(1 << n):
        corrected = pipe.overlap(mask) > 1 - 1e-12
        assert corrected == (bin(mask).count("1") <= k)


@pytest.mark.parametrize("k", [1, 2])
def test_coherent_decoder_matches_majority(k):
    # after the inverse encoder the ancillas hold the syndrome pattern; the
    # coherent correction flips the data qubit exactly when majority_decode says so
    lay = CodeLayout(k)
    n = lay.num_qubits
    decoder = build_decoder(lay)
    for data, anc in product((0, 1), range(1 << (n - 1))):
        bits = [data] + [(anc >> i) & 1 for i in range(n - 1)]
        # undo the inverse-encoder part by feeding an encoded basis state
        encoded = [bits[0]] + [b ^ bits[0] for b in bits[1:]]
        out = apply_gates(StateVector.basis(encoded), decoder)
        idx = int(np.argmax(abs(out.amplitudes)))
        readings = [-1 if (anc >> i) & 1 else 1 for i in range(n - 1)]
        assert (idx & 1) == data ^ int(majority_decode(readings, k))


def test_majority_decode_examples():
    assert majority_decode([-1, -1], 1) is True
    assert majority_decode([1, 1], 1) is False
    assert majority_decode([-1, -1, 1, 1], 2) is False
    assert majority_decode([[-1, -1], [1, -1]], 1) == [True, False]
    with pytest.raises(ValueError):
        majority_decode([0, 1], 1)


# ----------------------------------------------------------------- channels


def test_make_channel_two_qubit_weights():
    p = 0.2
    ch = make_channel(ChannelModel("bitflip", p, 2))
    weights = {str(op): w**2 for w, op in ch.operators}
    assert weights == pytest.approx({"II": (1 - p) ** 2, "XI": p * (1 - p), "IX": p * (1 - p), "XX": p**2})
    assert len(make_channel(ChannelModel("phaseflip", 0.0, 3)).operators) == 1
    big = make_channel(ChannelModel("phaseflip", 0.3, 6))
    total = sum(w**2 * op.to_matrix().conj().T @ op.to_matrix() for w, op in big.operators)
    assert np.allclose(total, np.eye(64), atol=1e-10)


def test_sandwich_is_hadamard_layer():
    lay = CodeLayout(1, "bipartite-bell")
    gates = phaseflip_sandwich(lay)
    assert [g.name for g in gates] == ["H"] * 6
    psi = RepetitionPipeline(lay).encoded
    assert np.allclose(apply_gates(apply_gates(psi, gates), gates).amplitudes, psi.amplitudes)


@pytest.mark.parametrize("scenario", ["single", "bipartite-bell", "bipartite-product"])
def test_phaseflip_matches_bitflip(scenario):
    lay = CodeLayout(1, scenario)
    for p in (0.0, 0.1, 0.3):
        assert enumerate_fidelity(lay, p, "phaseflip") == pytest.approx(enumerate_fidelity(lay, p), abs=1e-12)


# ------------------------------------------------------------- closed forms


def test_single_closed_form_values():
    P, F = closed_form_single_fidelity(1, 0.1)
    assert P == pytest.approx(0.972, abs=1e-12)
    assert F == pytest.approx(0.985900, abs=1e-6)
    P, F = closed_form_single_fidelity(2, 0.1)
    assert P == pytest.approx(0.99144, abs=1e-12)
    assert F == pytest.approx(0.995711, abs=1e-6)
    assert closed_form_single_fidelity(3, 0.0) == (1.0, 1.0)


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("p", [0.05, 0.1, 0.2, 0.3])
def test_single_closed_form_vs_enumeration(k, p):
    assert enumerate_fidelity(CodeLayout(k), p) == pytest.approx(closed_form_single_fidelity(k, p)[1], abs=1e-12)


def test_bipartite_k1_values():
    f_bell, coeffs = closed_form_bipartite_fidelity(1, 0.1, "bell")
    assert coeffs == (1, 6, 9, 0, 9, 6, 1)
    assert f_bell**2 == pytest.approx(0.945568, abs=1e-6)
    assert f_bell == pytest.approx(0.972403, abs=1e-6)
    f_prod, _ = closed_form_bipartite_fidelity(1, 0.1, "product")
    assert f_prod**2 == pytest.approx(0.944784, abs=1e-6)
    assert f_prod == pytest.approx(0.972000, abs=1e-6)


@pytest.mark.parametrize("kind,scenario", [("bell", "bipartite-bell"), ("product", "bipartite-product")])
def test_bipartite_k1_matches_enumeration(kind, scenario):
    for p in (0.05, 0.1, 0.3, 0.7):
        closed = closed_form_bipartite_fidelity(1, p, kind)[0]
        assert enumerate_fidelity(CodeLayout(1, scenario), p) == pytest.approx(closed, abs=1e-12)


def test_density_matrix_route_agrees():
    for scenario in ("single", "bipartite-bell", "bipartite-product"):
        lay = CodeLayout(1, scenario)
        assert density_matrix_fidelity(lay, 0.15) == pytest.approx(enumerate_fidelity(lay, 0.15), abs=1e-12)


def test_k2_coefficients_adjudicated():
    rep = adjudicate_coefficients(2, "bell")
    assert rep.enumerated == counted_coefficients(2, "bell")
    assert rep.enumerated == (1, 10, 45, 100, 100, 0, 100, 100, 45, 10, 1)
    assert [i for i, _, _ in rep.mismatches] == [4, 6]
    assert published_coefficients(1, "bell") == counted_coefficients(1, "bell")
    assert any("mismatch" in line for line in rep.lines())


@pytest.mark.parametrize("k", [1, 2, 3])
def test_counted_coefficients_sum(k):
    # every pattern is counted at most once; Bell counts both-correctable and both-failed
    b = 2 * k + 1
    ok = sum(comb(b, j) for j in range(k + 1))
    assert sum(counted_coefficients(k, "product")) == ok**2
    assert sum(counted_coefficients(k, "bell")) == 2 * ok**2


@given(st.floats(0, 1))
def test_bell_symmetric_product_not(p):
    for k in (1, 2):
        fb = closed_form_bipartite_fidelity(k, p, "bell", "counted")[0]
        assert fb == pytest.approx(closed_form_bipartite_fidelity(k, 1 - p, "bell", "counted")[0], abs=1e-12)
        assert fb >= closed_form_bipartite_fidelity(k, p, "product", "counted")[0] - 1e-12


def test_product_curve_is_asymmetric():
    assert abs(closed_form_bipartite_fidelity(1, 0.1, "product")[0]
               - closed_form_bipartite_fidelity(1, 0.9, "product")[0]) > 0.1


@given(st.floats(0, 0.5, exclude_max=True))
def test_order_and_encoding_help_below_half(p):
    assert closed_form_single_fidelity(2, p)[1] >= closed_form_single_fidelity(1, p)[1] - 1e-12
    f1 = closed_form_bipartite_fidelity(1, p, "bell", "counted")[0]
    f2 = closed_form_bipartite_fidelity(2, p, "bell", "counted")[0]
    assert f2 >= f1 - 1e-12
    if 1e-6 < p < 0.49:  # the curves meet at p = 0 and p = 1/2
        assert f1 > unencoded_min_fidelity(p, "bell")


# ---------------------------------------------------------------- unencoded


def test_unencoded_bell_values():
    assert unencoded_min_fidelity(0.25) == pytest.approx(0.790569, abs=1e-6)
    assert unencoded_min_fidelity(0.0) == 1
    assert unencoded_min_fidelity(0.5) == pytest.approx(0.707107, abs=1e-6)
    with pytest.raises(ValueError):
        unencoded_min_fidelity(-0.1)


def test_unencoded_arbitrary_oracle():
    rep = unencoded_arbitrary_report(0.1, grid=12)
    # worst case is a computational basis product state: fidelity (1-p)
    assert rep.oracle == pytest.approx(0.9, abs=1e-9)
    assert rep.linear_reading == pytest.approx(0.1)
    assert rep.sqrt_reading == pytest.approx(sqrt(0.1))


def test_pipeline_reduced_overlap_uses_data_qubits():
    lay = CodeLayout(1, "bipartite-bell")
    pipe = RepetitionPipeline(lay)
    state = pipe.decoded_state(0)
    assert reduced_overlap(state, pipe.input_state, lay.data_qubits) == pytest.approx(1)
    flipped = pipe.decoded_state(PauliString.from_str("XXIIII").x)
    assert reduced_overlap(flipped, pipe.input_state, lay.data_qubits) == pytest.approx(0, abs=1e-12)
