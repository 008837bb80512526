"""Behavioural equivalence and minimization of finite coalgebras by partition refinement."""

from .coalgebra import CoalgebraTable, build_table
from .formats import (
    FormatError, parse_aut, parse_coalg_text, read_partition, write_aut, write_coalg_text, write_partition,
)
from .functor import FunctorSyntaxError, format_functor, parse_functor_expr
from .minimize import (
    InstrumentationStats, PartitionResult, check_stable, minimize, naive_minimize, quotient,
)
from .monoids import ArithmeticOverflow
from .partition import RefinablePartition, new_partition
from .signature import TermError, encode_sig, renumber, renumber_prime, successors

__version__ = "0.1.0"

__all__ = [
    "ArithmeticOverflow", "CoalgebraTable", "FormatError", "FunctorSyntaxError", "InstrumentationStats",
    "PartitionResult", "RefinablePartition", "TermError", "build_table", "check_stable", "encode_sig",
    "format_functor", "minimize", "naive_minimize", "new_partition", "parse_aut", "parse_coalg_text",
    "parse_functor_expr", "quotient", "read_partition", "renumber", "renumber_prime", "successors",
    "write_aut", "write_coalg_text", "write_partition",
]
