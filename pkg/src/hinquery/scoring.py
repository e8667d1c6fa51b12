"""Closeness scoring and bound arithmetic.

The closeness of a node to an anchor decays exponentially with path length,
r = alpha^l. When the anchor's type forms an inheritance pair with the type
carrying a hierarchy edge, each hierarchy hop on the path is discounted by
beta, giving r = alpha^(l - beta * h) for h discounted hops. A star match
score is the sum of closeness values over the query's anchors; a general
match additionally sums closeness along query-node to query-node edges.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass


@dataclass(frozen=True)
class ScoringParams:
    """alpha in (0, 1]: decay per hop. beta in [0, 1): discount per hierarchy
    hop. beta = 0 disables the hierarchy discount entirely."""

    alpha: float = 0.5
    beta: float = 0.2

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not (0.0 <= self.beta < 1.0):
            raise ValueError(f"beta must be in [0, 1), got {self.beta}")
        if self.beta >= self.alpha:
            warnings.warn(f"beta ({self.beta}) >= alpha ({self.alpha}); "
                          "hierarchy hops may cost less than nothing", stacklevel=2)


@dataclass(frozen=True)
class PathStats:
    """Hop counts for one path: total length and discounted hierarchy hops."""

    length: int
    hierarchy_hops: int

    def __post_init__(self):
        if self.length < 0 or self.hierarchy_hops < 0:
            raise ValueError("hop counts must be non-negative")
        if self.hierarchy_hops > self.length:
            raise ValueError("hierarchy hops cannot exceed path length")


@dataclass(frozen=True)
class ClosenessScore:
    value: float
    lower: float
    upper: float

    def __post_init__(self):
        if not (self.lower <= self.value <= self.upper):
            raise ValueError("closeness bounds must bracket the value")


@dataclass(frozen=True)
class MatchingScore:
    value: float
    lower: float
    upper: float

    def __post_init__(self):
        if not (self.lower <= self.value <= self.upper):
            raise ValueError("score bounds must bracket the value")


def closeness(stats, params, inheritance_pair):
    """Closeness of a node at the far end of a path from an anchor.

    With no inheritance pair in play every hop costs one full unit. With a
    pair, each hierarchy hop is discounted by beta. A zero-length path means
    the node is the anchor itself and scores exactly 1.
    """
    if stats.length == 0:
        return 1.0
    if not inheritance_pair:
        return params.alpha ** stats.length
    return params.alpha ** (stats.length - params.beta * stats.hierarchy_hops)


def star_score(closeness_values):
    """Sum of per-anchor closeness values for one candidate."""
    values = list(closeness_values)
    if not values:
        raise ValueError("star score needs at least one anchor closeness")
    return math.fsum(values)


def lower_bound_step(prev_lower, parent_lower, hierarchy_edge, params):
    """One propagation step of the running closeness lower bound.

    A node that already has a positive bound keeps it. Otherwise it inherits
    the propagating neighbor's bound across the connecting edge: a full decay
    step alpha for a normal edge, a discounted step alpha^(1 - beta) for a
    hierarchy edge.
    """
    if prev_lower > 0.0:
        return prev_lower
    step = params.alpha ** (1.0 - params.beta) if hierarchy_edge else params.alpha
    return step * parent_lower


def upper_bound_step(current_lower, t, params, discount_applicable):
    """Closeness upper bound after t propagation rounds.

    A node with a positive lower bound has been reached and its bound is
    already exact there. An unreached node can still be hit by a path of at
    least t hops, each worth at most alpha^(1 - beta) when the anchor
    discounts some hierarchy type, else alpha.
    """
    if t < 0:
        raise ValueError("round counter must be non-negative")
    if current_lower > 0.0:
        return current_lower
    if discount_applicable:
        return params.alpha ** (t * (1.0 - params.beta))
    return params.alpha ** t


def aggregate_bounds(per_anchor_bounds):
    """Sum per-anchor (lower, upper) closeness bounds into match score bounds."""
    lowers = []
    uppers = []
    for lo, hi in per_anchor_bounds:
        lowers.append(lo)
        uppers.append(hi)
    if not lowers:
        raise ValueError("no anchor bounds to aggregate")
    return math.fsum(lowers), math.fsum(uppers)


def general_score(star_scores, edge_scores):
    """Total score of a general match: star contributions plus closeness along
    query-node to query-node edges."""
    return math.fsum(star_scores) + math.fsum(edge_scores)
