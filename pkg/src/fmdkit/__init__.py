"""fmd-kit: filter mode decomposition into energy-preserving components."""

from .epcheck import (
    FMDSystem,
    ProbeReport,
    SequenceVerdict,
    classify_system,
    probe_additivity,
    probe_homogeneity,
    probe_time_invariance,
    verify_sequence,
)
from .filters import FilterSpec, apply_zero_phase, gaussian_response, ideal_response, moving_average
from .fmd import (
    DecompositionResult,
    LinearDependenceError,
    build_ledger,
    decompose,
    decompose_linoep_filter_side,
    decompose_linoep_residue_side,
    decompose_plain,
    gram_schmidt,
)
from .signal import EnergyLedger, as_signal, energy, inner_product, norm, pee
from .spiral import SpiralPath, theodorus_2d, theodorus_3d, theodorus_nd
from .transform import dft_forward, dft_inverse

__version__ = "0.1.0"
