"""Deterministic soft-covering codebooks for classical-quantum channels.

Builds channel-resolvability codebooks with a matrix multiplicative-weights
selection loop and numerically certifies every guarantee the construction
carries: the regret cap of the weight update, the per-round selection-margin
floor, the operator floor on the covered mixture, the cost-normalizer cap,
typicality trace/mass bounds, and the end-to-end trace-distance bound, all
against brute-force and random-coding baselines.
"""

from .channel import (
    CQChannel,
    classical_embed,
    holevo_capacity,
    holevo_information,
    output_mix,
    pure_state_channel,
    von_neumann_entropy,
)
from .errors import (
    CertificateError,
    ChannelSpecError,
    ContractViolation,
    DimensionMismatch,
    GuardrailError,
    ResolvonError,
    SpectralError,
)
from .hermitian import (
    HermitianOperator,
    Projector,
    SpectralDecomposition,
    apply_spectral_function,
    expm_scaled,
    gen_inv_sqrt,
    pinch,
    positive_part_trace,
    psd_leq,
    scalar_dominance_transfer_check,
    spectral_decompose,
    support_projector,
    trace_distance,
)
from .mmwu import MmwuState, density_of, new_state, regret_gap, run_sequence, step
from .resolve import (
    BaselineStats,
    BlockDistribution,
    ResolvabilityReport,
    brute_force_oracle,
    fixed_type_resolve,
    general_resolve,
    random_baseline,
)
from .softcover import (
    Codebook,
    CoverCertificate,
    Hypergraph,
    ProjectorSplit,
    SoftCoverParams,
    build_codebook,
    certify,
    compute_cost_family,
    mixed_edge,
    required_size,
    split_projectors,
)
from .typeclasses import TypeClass, enumerate_types, sequences_of_type, type_of
from .typicality import (
    TypicalitySpec,
    alpha_for_mass_deficit,
    build_edge,
    conditional_typical_projector,
    typical_projector,
)

__version__ = "0.1.0"
