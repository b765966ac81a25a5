"""Desk-scale verification of sumset growth for dense subsets of the primes.

The package splits into number-theoretic groundwork (`ntheory`), discrete
Fourier analysis on Z_N (`zn_spectral`), residue partitions and weighted
embeddings of prime subsets (`prime_embed`), exact sumset and moment
machinery on Z_m (`zm_sumsets`), and an experiment pipeline with a CLI
(`expcli`).
"""

from .errors import (
    ConfigurationError,
    DomainError,
    InvariantViolation,
    RangeOverflowError,
    SizeLimitError,
)
from .ntheory import (
    FactoredModulus,
    PrimeTable,
    factorize,
    primorial,
    sieve_primes,
    split_by_threshold,
)
from .prime_embed import (
    DeltaAggregate,
    EmbeddedClass,
    MassCheck,
    PairSumsetReport,
    PseudorandomDeficit,
    ResiduePartition,
    aggregate_delta,
    choose_N,
    embed_class,
    embedding_mass_check,
    good_set,
    pair_sumset_report,
    partition_and_densities,
    pseudorandom_deficit,
)
from .zm_sumsets import (
    CkSeriesResult,
    CollisionStats,
    ExtremalConstruction,
    HolderCertificate,
    MomentCertificate,
    RepresentationHistogram,
    SubsetOfZm,
    TailCountReport,
    ZnStarReport,
    capital_R,
    choose_moment_order,
    ck_series,
    collision_stats,
    cyclic_sumset_size,
    divisor_stratification,
    extremal_construct,
    holder_lower_bound,
    implied_constant_trend,
    integer_sumset,
    kth_moment,
    mertens_ratio,
    rep_histogram,
    sumset,
    tail_count,
    znstar_certificate,
)
from .zn_spectral import (
    BohrSet,
    ConvolutionProofReport,
    Decomposition,
    DensityFunction,
    Spectrum,
    bohr_set,
    constant,
    convolution_proof_quantities,
    convolve,
    convolve_direct,
    dft,
    dft_direct,
    green_decompose,
    indicator,
    inverse_dft,
    large_spectrum,
    lp_fourier_norm,
    positive_support,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DomainError",
    "InvariantViolation",
    "RangeOverflowError",
    "SizeLimitError",
    "FactoredModulus",
    "PrimeTable",
    "factorize",
    "primorial",
    "sieve_primes",
    "split_by_threshold",
    "DeltaAggregate",
    "EmbeddedClass",
    "MassCheck",
    "PairSumsetReport",
    "PseudorandomDeficit",
    "ResiduePartition",
    "aggregate_delta",
    "choose_N",
    "embed_class",
    "embedding_mass_check",
    "good_set",
    "pair_sumset_report",
    "partition_and_densities",
    "pseudorandom_deficit",
    "CkSeriesResult",
    "CollisionStats",
    "ExtremalConstruction",
    "HolderCertificate",
    "MomentCertificate",
    "RepresentationHistogram",
    "SubsetOfZm",
    "TailCountReport",
    "ZnStarReport",
    "capital_R",
    "choose_moment_order",
    "ck_series",
    "collision_stats",
    "cyclic_sumset_size",
    "divisor_stratification",
    "extremal_construct",
    "holder_lower_bound",
    "implied_constant_trend",
    "integer_sumset",
    "kth_moment",
    "mertens_ratio",
    "rep_histogram",
    "sumset",
    "tail_count",
    "znstar_certificate",
    "BohrSet",
    "ConvolutionProofReport",
    "Decomposition",
    "DensityFunction",
    "Spectrum",
    "bohr_set",
    "constant",
    "convolution_proof_quantities",
    "convolve",
    "convolve_direct",
    "dft",
    "dft_direct",
    "green_decompose",
    "indicator",
    "inverse_dft",
    "large_spectrum",
    "lp_fourier_norm",
    "positive_support",
    "__version__",
]
