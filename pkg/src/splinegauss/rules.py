"""Quadrature rule container shared by the rule-producing modules."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

__all__ = ["QuadratureRule"]


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for exact integration over an interval.

    ``meta`` carries provenance (traced / asymptotic / hybrid / gauss),
    the generating space description, and trace statistics when available.
    """

    interval: tuple[float, float]
    nodes: np.ndarray
    weights: np.ndarray
    residual_norm: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-D arrays of equal length")
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(
            self, "interval", (float(self.interval[0]), float(self.interval[1]))
        )

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    def apply(self, f: Callable[[float], float]) -> float:
        """Approximate the integral of ``f`` over the interval."""
        return float(sum(w * f(x) for x, w in zip(self.nodes, self.weights)))

    def mapped_to(self, interval: tuple[float, float]) -> "QuadratureRule":
        """Affinely transplanted rule: nodes mapped, weights scaled."""
        a, b = self.interval
        c, e = map(float, interval)
        scale = (e - c) / (b - a)
        return replace(
            self,
            interval=(c, e),
            nodes=c + (self.nodes - a) * scale,
            weights=self.weights * scale,
        )

    def element_of(self, breaks) -> np.ndarray:
        """1-based element index of each node for the given breakpoints."""
        breaks = np.asarray(breaks, dtype=float)
        idx = np.searchsorted(breaks, self.nodes, side="right")
        return np.clip(idx, 1, len(breaks) - 1)
