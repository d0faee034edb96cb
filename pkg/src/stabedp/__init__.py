"""Stabilizer-code entanglement distillation: encoders, simulation, and search."""

from .edp import BellDiagonal, BranchResult, YieldPoint, run_protocol, werner_input, yield_curve
from .encoder import EncoderParams, EncodingClass, FRule, ProtocolSpec, g_map
from .gf import GFVector, HyperbolicExtension, Subspace
from .pauli import PauliElement, Stabilizer
from .search import SearchConfig, candidate_count

__all__ = [
    "BellDiagonal", "BranchResult", "EncoderParams", "EncodingClass", "FRule", "GFVector",
    "HyperbolicExtension", "PauliElement", "ProtocolSpec", "SearchConfig", "Stabilizer",
    "Subspace", "YieldPoint", "candidate_count", "g_map", "run_protocol",
    "werner_input", "yield_curve",
]
