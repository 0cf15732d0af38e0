"""Fully dynamic approximate Euclidean bi-chromatic matching.

Points live on a randomly shifted p-tree. Leaves are matched exactly, and
internal nodes match aggregated excess points through small transportation
problems. Both dynamic matchers keep that solution current under insertions
and deletions of red/blue pairs.
"""

from .advanced import AdvancedMatcher, augment_matching, remove_pair_from_node
from .core import (
    Assignment,
    Color,
    MatcherConfig,
    Matching,
    Point,
    PointRecord,
    TransportInstance,
    assignment_cost,
    distance,
    matching_cost,
    validate_matching,
)
from .dynamic import DynamicMatcher, UpdateReport
from .exact import brute_force_matching, brute_force_transport, hungarian, solve_transport
from .kernels import BACKEND
from .ptree import RestrictedPTree, build_tree
from .static import extract_full_matching, static_matching

__version__ = "0.1.0"

__all__ = [
    "AdvancedMatcher", "Assignment", "BACKEND", "Color", "DynamicMatcher", "MatcherConfig",
    "Matching", "Point", "PointRecord", "RestrictedPTree", "TransportInstance", "UpdateReport",
    "assignment_cost", "augment_matching", "brute_force_matching", "brute_force_transport",
    "build_tree", "distance", "extract_full_matching", "hungarian", "matching_cost",
    "remove_pair_from_node", "solve_transport", "static_matching", "validate_matching",
]
