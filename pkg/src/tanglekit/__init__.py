"""Exact counting, uniform sampling and shape statistics of tanglegrams.

A tanglegram is a pair of rooted binary trees on ``n`` leaves together with a
perfect matching of their leaves, taken up to isomorphism of either tree.
"""

from .errors import CapExceeded, ConsistencyError, DomainError, ParseError, TanglekitError
from .measures import t_n, total_variation
from .partitions import BinaryPartition, cycle_spectrum
from .rng import Rng
from .sampling import SamplerConfig, Tanglegram, iter_samples, parse_tanglegram
from .trees import Tree, canonicalize, parse_tree, serialize_tree

__version__ = "0.1.0"

__all__ = [
    "BinaryPartition", "CapExceeded", "ConsistencyError", "DomainError", "ParseError",
    "Rng", "SamplerConfig", "Tanglegram", "TanglekitError", "Tree", "canonicalize",
    "cycle_spectrum", "iter_samples", "parse_tanglegram", "parse_tree", "serialize_tree",
    "t_n", "total_variation",
]
