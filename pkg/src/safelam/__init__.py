"""Simply typed lambda-calculus toolkit with a safe-term compiler for
star-free expressions."""

import sys as _sys

# deep but bounded recursions (type resolution, small-term walks); the truly
# deep traversals over terms are all iterative
if _sys.getrecursionlimit() < 20_000:
    _sys.setrecursionlimit(20_000)

from .church import Alphabet, EncodedValue, bool_ops, cat, cat_k, decode_bool, decode_word, encode_word, tow
from .compiler import CompiledHelper, CompiledLanguage, build_any, build_b, build_enum, build_split, compile_expr
from .inference import NoCommonType, NotTypable, Typing, erase, infer, infer_pair, reconstruct_normal
from .normalize import (
    BudgetExceeded,
    beta_convertible,
    beta_eta_convertible,
    eta_reduce,
    max_redex_degree,
    normalize_naive,
    normalize_parallel,
    parallel_step,
)
from .safety import SafetyReport, check_hls, check_long_safe, check_safe, inford
from .starfree import StarFreeExpr, equivalent_up_to, member, mk_equiv_expr, nonempty_up_to, parse_expr
from .syntax import Term, alpha_eq, format_term, free_vars, metrics, parse_term, substitute
from .types import Ty, TypeStore, degree, is_homogeneous, order, subst_base, unfold_size

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
