"""Dispersion-robust composite pulses from Fourier synthesis and delta modulation."""

from .bloch import EnsembleGrid, ErrorReport, SimOptions, StateProfile, evaluate_program, l2_error, simulate_program
from .estimator import PulseDesigner
from .modulation import ModulationSpec, SampledShape, linear_first_order, robust_composite, simulate_modulated
from .notation import PulseParseError, parse_program, serialize_program
from .pulses import Block, PulseProgram, RfSegment, ZShift, compile_design, split_amplitude, total_flip_angle
from .records import DesignRecord, Method, Selection, load_design, save_design
from .search import SearchOptions, design, gradient_search, greedy_search, heuristic_frequencies
from .synthesis import BasisSpec, IllConditionedError, TargetProfile, gram_solve, residual_functional

__version__ = "0.1.0"

__all__ = [
    "BasisSpec", "Block", "DesignRecord", "EnsembleGrid", "ErrorReport", "IllConditionedError", "Method",
    "ModulationSpec", "PulseDesigner", "PulseParseError", "PulseProgram", "RfSegment", "SampledShape",
    "SearchOptions", "Selection", "SimOptions", "StateProfile", "TargetProfile", "ZShift", "compile_design",
    "design", "evaluate_program", "gradient_search", "gram_solve", "greedy_search", "heuristic_frequencies",
    "l2_error", "linear_first_order", "load_design", "parse_program", "residual_functional", "robust_composite",
    "save_design", "serialize_program", "simulate_modulated", "simulate_program", "split_amplitude",
    "total_flip_angle",
]
