"""Desk-scale dilations of Fourier multiplier semigroups on finite groups."""

__version__ = "0.1.0"

from .groups import FiniteGroup, GroupAlgebraElement, load_group  # noqa: E402
from .symbols import SymbolFunction, builtin_psi, is_cond_negative_type  # noqa: E402
from .cocycle import Cocycle, extract_cocycle  # noqa: E402
from .gaussalg import GaussExp, GaussianSampler, expectation, mc_expectation  # noqa: E402
from .crossed import CrossedElement, apply_Ut  # noqa: E402
from .dilation import verify_dilation, verify_markov_semigroup, verify_weight_compat  # noqa: E402

__all__ = [
    "Cocycle", "CrossedElement", "FiniteGroup", "GaussExp", "GaussianSampler", "GroupAlgebraElement",
    "SymbolFunction", "apply_Ut", "builtin_psi", "expectation", "extract_cocycle", "is_cond_negative_type",
    "load_group", "mc_expectation", "verify_dilation", "verify_markov_semigroup", "verify_weight_compat",
]
