"""Repetition-encoded Bell pairs: dense simulation, Pauli algebra, decoders and protocols."""
from .core import (
    DensityMatrix,
    Gate,
    KrausChannel,
    StateVector,
    apply_channel,
    apply_gate,
    apply_gates,
    bell_transform,
    fidelity,
    mutual_information,
    partial_trace,
    prepare_bell,
    von_neumann_entropy,
)
from .pauli import GeneratorSet, PauliString, Syndrome, commutes, measure_syndrome_circuit, multiply, syndrome
from .repetition import (
    ChannelModel,
    CodeLayout,
    build_decoder,
    build_encoder,
    closed_form_bipartite_fidelity,
    closed_form_single_fidelity,
    make_channel,
    unencoded_min_fidelity,
)
from .stabilizer import (
    bell_code_generators,
    build_syndrome_table,
    product_code_generators,
    rotation_correct,
    short_distance_pipeline,
)
from .longdistance import run_protocol, split_generators
from .experiments import ExperimentConfig, ResultRow, enumerate_exact, monte_carlo, sweep

__version__ = "0.1.0"
