"""Exact invariant theory for skew polynomial rings and quantum 2x2 matrices."""
from __future__ import annotations

from .algebra import NCPoly, PBWPresentation, general, make_presentation, quantum_matrix, skew
from .autgroup import FiniteGroup, GradedMap, close_group, g_b, tau, theta
from .cyclotomic import CycScalar
from .errors import (FieldMismatchError, GroupTooLargeError, InternalConsistencyError, NotAutomorphismError,
                     SpecError)
from .invariants import (circle_invariant_generators, fixed_space_basis, free_module_check,
                         generator_mining_and_verify, mine_generators, reynolds, verify_generators)
from .series import molien_fixed_hilbert, trace_series
from .structure import block_circle_decomposition, classify_quasi_reflection, decide_stc, make_M_group

__version__ = "0.1.0"
