"""Two-way comparison search trees: optimal nil/loc trees and the nil-to-loc conversion."""

from .core import (
    Atom,
    Comparison,
    Instance,
    Internal,
    IntervalLeaf,
    Interval,
    Key,
    KeyLeaf,
    NilLeaf,
    Op,
    Tree,
    TreeKind,
    answer,
    cost,
    eq,
    find_break_leaf,
    has_break,
    less,
    prune_redundant,
    query_set,
    search,
    validate,
)
from .convert import exact_expected_cost, merge_convert, process
from .optimal import brute_force_optimal, optimal

__version__ = "0.1.0"
