"""Distance spectra, union bounds and link simulation for the punctured
802.11 binary convolutional code (K=7, generators 133/171 octal)."""

from .bounds import (
    BoundCurve,
    BoundQuery,
    ModulationSpec,
    bep_union_bound,
    fer_union_bound,
    q_function,
    single_term_approx,
    uncoded_curve,
)
from .code_model import (
    STANDARD_GENERATORS,
    STANDARD_MASKS,
    GeneratorSet,
    PunctureSchedule,
    encode,
    puncture,
    schedule_for_rate,
)
from .link_sim import SimConfig, SimResult, StopRule, run_point, run_sweep
from .spectrum import DistanceSpectrum, brute_force_spectrum, compute_spectrum
from .viterbi import BACKEND, viterbi_decode, viterbi_decode_batch

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundCurve",
    "BoundQuery",
    "DistanceSpectrum",
    "GeneratorSet",
    "ModulationSpec",
    "PunctureSchedule",
    "STANDARD_GENERATORS",
    "STANDARD_MASKS",
    "SimConfig",
    "SimResult",
    "StopRule",
    "bep_union_bound",
    "brute_force_spectrum",
    "compute_spectrum",
    "encode",
    "fer_union_bound",
    "puncture",
    "q_function",
    "run_point",
    "run_sweep",
    "schedule_for_rate",
    "single_term_approx",
    "uncoded_curve",
    "viterbi_decode",
    "viterbi_decode_batch",
]
