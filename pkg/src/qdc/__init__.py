"""Exact verification of quantum-group differential algebras by term rewriting."""

from .scalars import Field, Scalar, constants, eval_at, field
from .rmatrix import ScalarMatrix, build_rhat, check_hecke, check_ybe, qtrace, qtrace_weights, rhat_inverse
from .ncalg import PolyMatrix, Polynomial, graded_commutator, qdet, substitute
from .rewrite import MonomialOrder, RuleSet, complete_bounded, orient_relations, overlap_check, reduce
from .expr import format_poly, parse_expr
from .presentations import Presentation, defined_symbols, presentation
from .battery import CheckResult, run_check, run_suite

__version__ = "0.1.0"
