"""Bounded-depth modulo-2 rectifier circuits for Boolean circulant matrices."""

from circsynth.gf2core import (
    CirculantKernel,
    circulant_to_matrix,
    cyclic_convolve,
    kernel_from_first_row,
    mat_vec_mod2,
    random_kernel,
)
from circsynth.circuit import RectifierCircuit
from circsynth.synthesis import SynthPlan, plan_parameters, synth
from circsynth.verify import audit_bounds, verify_exact, verify_freivalds

__all__ = [
    "CirculantKernel",
    "RectifierCircuit",
    "SynthPlan",
    "audit_bounds",
    "circulant_to_matrix",
    "cyclic_convolve",
    "kernel_from_first_row",
    "mat_vec_mod2",
    "plan_parameters",
    "random_kernel",
    "synth",
    "verify_exact",
    "verify_freivalds",
]

__version__ = "0.1.0"
