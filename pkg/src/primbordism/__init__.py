"""Multiple points of immersion lifts versus Morin singularities of their projections.

Exact local normal-form algebra lives in ``poly``, ``normal_form`` and
``local_cobordism``; the global numerical engine for concrete maps lives in
``prim_map``, ``multipoint`` and ``bordism``; ``cli`` ties them together.
"""

__version__ = "0.1.0"

from .bordism import euler_cross_check, parity_chain, trace_cobordism  # noqa: E402
from .multipoint import covering_check, find_mixed, find_multiple_points, find_strata  # noqa: E402
from .prim_map import builtin_model, eval_jet, genericity_report  # noqa: E402

__all__ = [
    "builtin_model",
    "covering_check",
    "euler_cross_check",
    "eval_jet",
    "find_mixed",
    "find_multiple_points",
    "find_strata",
    "genericity_report",
    "parity_chain",
    "trace_cobordism",
]
