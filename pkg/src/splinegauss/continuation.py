"""Path tracking from the per-element Gauss rule to the target rule.

The rule (nodes and weights) is a root of the square exactness system
``F(x, t) = 0`` demanding that every basis function of the time-``t``
spline space is integrated exactly over ``[a, b]``.  A secant predictor
and damped Newton corrector advance the root as the knots travel; when
the source carries surplus basis functions, the trailing nodes drift to
``b`` with vanishing weights and a reduced solve on the exact target
space finishes the job.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import basis
from .gauss import source_rule
from .knots import KnotPath, SplineSpace, knot_path, source_space, space_at
from .rules import QuadratureRule

__all__ = [
    "TraceConfig",
    "TraceResult",
    "NewtonFailure",
    "residual",
    "jacobian",
    "residual_norm",
    "newton_correct",
    "finalize_limit",
    "trace",
]

# Pivot smaller than this times the largest entry of the row-equilibrated
# factor is declared singular.
_PIVOT_REL_TOL = 1e-14

# The full system is traced until 1 - t falls below this before the
# degenerate limit is finalized; the dying weights are then genuinely tiny
# while knot gaps stay two orders above the coincidence tolerance.
_TAIL_GAP = 1e-8

# A corrector failure beyond this time with surplus basis functions
# triggers the pre-clamped reduced finish instead of a stall.
_LATE_FAILURE_TIME = 1.0 - 1e-3


class NewtonFailure(RuntimeError):
    """Corrector did not produce a root; ``cause`` names the reason."""

    def __init__(self, cause: str, message: str = ""):
        super().__init__(message or cause)
        self.cause = cause


@dataclass(frozen=True)
class TraceConfig:
    """Step-size and corrector policy for the path tracker."""

    initial_step: float = 1e-2
    min_step: float = 1e-10
    max_step: float = 5e-2
    newton_tol: float = 1e-14
    newton_max_iters: int = 25
    shrink: float = 0.5
    grow: float = 1.5
    limit_weight_threshold: float = 1e-10

    def __post_init__(self):
        if not 0 < self.min_step <= self.initial_step <= self.max_step < 1:
            raise ValueError(
                "need 0 < min_step <= initial_step <= max_step < 1"
            )
        if self.newton_tol <= 0 or self.limit_weight_threshold <= 0:
            raise ValueError("tolerances must be positive")
        if self.newton_max_iters < 1:
            raise ValueError("newton_max_iters must be at least 1")


@dataclass(frozen=True)
class TraceResult:
    """Outcome of a trace: the rule plus path statistics."""

    rule: QuadratureRule
    steps_taken: int
    newton_failures: int
    t_reached: float
    status: str  # "converged" | "stalled"

    @property
    def converged(self) -> bool:
        return self.status == "converged"


@dataclass
class _System:
    """Exactness system of one spline space with integrals over [a, b]."""

    space: SplineSpace
    cutoff: float
    integrals: np.ndarray = field(init=False)

    def __post_init__(self):
        self.integrals = basis.integrals_up_to(self.space, self.cutoff)

    @property
    def size(self) -> int:
        return self.space.dimension

    def residual(self, nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
        out = -np.array(self.integrals)
        d = self.space.degree
        for x, w in zip(nodes, weights):
            ev = basis.evaluate(self.space, x)
            out[ev.first_index : ev.first_index + d + 1] += w * ev.values
        return out

    def jacobian(self, nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
        m = len(nodes)
        d = self.space.degree
        jac = np.zeros((self.size, 2 * m))
        for j, (x, w) in enumerate(zip(nodes, weights)):
            ev = basis.evaluate(self.space, x)
            rows = slice(ev.first_index, ev.first_index + d + 1)
            jac[rows, j] = w * ev.derivatives
            jac[rows, m + j] = ev.values
        return jac


def _check_shapes(space: SplineSpace, rule: QuadratureRule) -> None:
    if space.dimension != 2 * rule.num_nodes:
        raise ValueError(
            f"system is not square: dimension {space.dimension} vs "
            f"{2 * rule.num_nodes} unknowns"
        )


def residual(space: SplineSpace, rule: QuadratureRule) -> np.ndarray:
    """Exactness defects ``Q[D_i] - I[D_i]`` over ``[a, b]``."""
    _check_shapes(space, rule)
    sys = _System(space, cutoff=rule.interval[1])
    return sys.residual(rule.nodes, rule.weights)


def residual_norm(space: SplineSpace, rule: QuadratureRule) -> float:
    """Euclidean norm of the defects divided by the system dimension."""
    return float(np.linalg.norm(residual(space, rule))) / space.dimension


def jacobian(space: SplineSpace, rule: QuadratureRule) -> np.ndarray:
    """Dense derivative of the defects w.r.t. nodes then weights."""
    _check_shapes(space, rule)
    sys = _System(space, cutoff=rule.interval[1])
    return sys.jacobian(rule.nodes, rule.weights)


def _solve_equilibrated(jac: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Row-equilibrated LU solve; raises NewtonFailure on tiny pivots."""
    scale = np.maximum(np.abs(jac).max(axis=1), 1e-300)
    lu, piv = scipy.linalg.lu_factor(jac / scale[:, None])
    diag = np.abs(np.diag(lu))
    if diag.min() < _PIVOT_REL_TOL * max(np.abs(lu).max(), 1e-300):
        raise NewtonFailure("singular", "linear solve hit a negligible pivot")
    return scipy.linalg.lu_solve((lu, piv), rhs / scale)


def _in_domain(
    nodes: np.ndarray, weights: np.ndarray, interval: tuple[float, float]
) -> bool:
    a, b = interval
    if nodes[0] < a or nodes[-1] > b:
        return False
    if np.any(np.diff(nodes) < 0.0):
        return False
    if np.any(weights < 0.0) or np.any(weights > (b - a)):
        return False
    return True


def _newton(
    sys: _System,
    interval: tuple[float, float],
    nodes: np.ndarray,
    weights: np.ndarray,
    cfg: TraceConfig,
) -> tuple[np.ndarray, np.ndarray, float, int]:
    """Damped Newton on the exactness system from an in-domain guess."""
    if not _in_domain(nodes, weights, interval):
        raise NewtonFailure("left-domain", "guess violates the node/weight box")
    m = len(nodes)
    x = np.concatenate([nodes, weights])
    f = sys.residual(x[:m], x[m:])
    norm = np.linalg.norm(f) / sys.size
    for it in range(1, cfg.newton_max_iters + 1):
        if norm <= cfg.newton_tol:
            return x[:m], x[m:], float(norm), it - 1
        step = -_solve_equilibrated(sys.jacobian(x[:m], x[m:]), f)
        in_domain_once = False
        for _ in range(10):
            trial = x + step
            if _in_domain(trial[:m], trial[m:], interval):
                in_domain_once = True
                f_trial = sys.residual(trial[:m], trial[m:])
                norm_trial = np.linalg.norm(f_trial) / sys.size
                if norm_trial < norm or norm_trial <= cfg.newton_tol:
                    x, f, norm = trial, f_trial, norm_trial
                    break
            step *= 0.5
        else:
            raise NewtonFailure(
                "iteration-cap" if in_domain_once else "left-domain",
                "damped step made no progress"
                if in_domain_once
                else "damped step could not stay in the domain",
            )
    if norm <= cfg.newton_tol:
        return x[:m], x[m:], float(norm), cfg.newton_max_iters
    raise NewtonFailure(
        "iteration-cap",
        f"no convergence in {cfg.newton_max_iters} iterations "
        f"(residual {norm:.3e})",
    )


def newton_correct(
    space: SplineSpace, guess: QuadratureRule, cfg: TraceConfig | None = None
) -> QuadratureRule:
    """Polish a nearby guess into a root of the space's exactness system.

    Raises :class:`NewtonFailure` (cause ``singular``, ``iteration-cap`` or
    ``left-domain``) instead of returning an unconverged rule.
    """
    cfg = cfg or TraceConfig()
    _check_shapes(space, guess)
    sys = _System(space, cutoff=guess.interval[1])
    nodes, weights, norm, _ = _newton(
        sys, guess.interval, guess.nodes, guess.weights, cfg
    )
    return QuadratureRule(
        interval=guess.interval,
        nodes=nodes,
        weights=weights,
        residual_norm=norm,
        meta=dict(guess.meta),
    )


def _strip_external(space: SplineSpace, b: float, r: int) -> SplineSpace:
    """Target space recovered by dropping breakpoints beyond ``b``."""
    from .knots import KnotVector

    a = space.knots.a
    edge = b + 1e-12 * (b - a)
    keep = [k for k, x in enumerate(space.knots.breaks) if x <= edge]
    dropped = space.knots.cardinality - sum(space.knots.mults[k] for k in keep)
    if dropped != r:
        raise RuntimeError(
            f"internal error: expected {r} external knots, found {dropped}"
        )
    return SplineSpace(
        space.degree,
        KnotVector(
            [space.knots.breaks[k] for k in keep],
            [space.knots.mults[k] for k in keep],
        ),
    )


def finalize_limit(
    space_t1: SplineSpace,
    rule: QuadratureRule,
    r: int,
    cfg: TraceConfig | None = None,
    force: bool = False,
) -> QuadratureRule:
    """Resolve the degenerate end state into the reduced target rule.

    The trailing ``r/2`` nodes (at ``b`` with vanished weights) and the
    ``r`` basis functions without support in ``[a, b]`` are dropped, and
    the remaining square system is Newton-solved on the exact target
    space.  With ``r = 0`` the rule is returned unchanged.  ``force``
    skips the degeneracy check; used when a late corrector failure makes
    the tracker clamp onto the limit early.
    """
    cfg = cfg or TraceConfig()
    if r == 0:
        return rule
    if r % 2:
        raise ValueError(f"surplus dimension must be even; got {r}")
    a, b = rule.interval
    drop = r // 2
    tail_nodes = rule.nodes[-drop:]
    tail_weights = rule.weights[-drop:]
    near_b = np.all(b - tail_nodes <= 1e-6 * (b - a))
    tiny_w = np.all(tail_weights <= cfg.limit_weight_threshold * (b - a))
    if not (near_b or tiny_w or force):
        raise NewtonFailure(
            "not-degenerate",
            "trailing nodes/weights are not close to the boundary limit",
        )
    target = _strip_external(space_t1, b, r)
    # Supports must confirm that exactly r basis functions left [a, b].
    gone = space_t1.dimension - target.dimension
    if gone != r:
        raise RuntimeError(
            f"internal error: {gone} basis functions left the interval, "
            f"expected {r}"
        )
    sys = _System(target, cutoff=b)
    nodes, weights, norm, _ = _newton(
        sys, rule.interval, rule.nodes[:-drop], rule.weights[:-drop], cfg
    )
    meta = dict(rule.meta)
    meta["dropped_nodes"] = [float(x) for x in tail_nodes]
    meta["dropped_weights"] = [float(w) for w in tail_weights]
    return QuadratureRule(
        interval=rule.interval,
        nodes=nodes,
        weights=weights,
        residual_norm=norm,
        meta=meta,
    )


@dataclass
class _Tracker:
    """Mutable state of one trace run."""

    path: KnotPath
    cfg: TraceConfig
    t: float = 0.0
    t_prev: float = 0.0
    x: np.ndarray | None = None
    x_prev: np.ndarray | None = None
    steps: int = 0
    failures: int = 0

    def predict(self, t_next: float) -> np.ndarray:
        if self.t == self.t_prev:
            guess = np.array(self.x)
        else:
            slope = (self.x - self.x_prev) / (self.t - self.t_prev)
            guess = self.x + slope * (t_next - self.t)
        m = len(guess) // 2
        a, b = self.path.interval
        guess[:m] = np.clip(guess[:m], a, b)
        guess[m:] = np.clip(guess[m:], 0.0, b - a)
        return guess

    def accept(self, t_next: float, nodes: np.ndarray, weights: np.ndarray):
        self.t_prev, self.x_prev = self.t, self.x
        self.t, self.x = t_next, np.concatenate([nodes, weights])
        self.steps += 1

    def correct_at(self, t_next: float) -> tuple[np.ndarray, np.ndarray, int]:
        sp = space_at(self.path, t_next)
        sys = _System(sp, cutoff=self.path.interval[1])
        guess = self.predict(t_next)
        m = len(guess) // 2
        nodes, weights, _, iters = _newton(
            sys, self.path.interval, guess[:m], guess[m:], self.cfg
        )
        return nodes, weights, iters


def trace(target: SplineSpace, cfg: TraceConfig | None = None) -> TraceResult:
    """Compute the optimal rule for ``target`` by continuation.

    Builds the source space and its per-element Gauss rule, moves the
    knots along the geodesic path with adaptive steps, and finishes with
    the reduced limit solve when the source had surplus dimensions.
    Stalls (step underflow before reaching the end) are reported through
    ``status``, never raised.
    """
    cfg = cfg or TraceConfig()
    src = source_space(target)
    r = src.dimension - target.dimension
    path = knot_path(src, target)
    start = source_rule(src)
    a, b = target.interval

    tr = _Tracker(path=path, cfg=cfg)
    tr.x = np.concatenate([start.nodes, start.weights])

    def result(rule: QuadratureRule, status: str, t_reached: float) -> TraceResult:
        meta = dict(rule.meta)
        meta.update(
            provenance="traced",
            space=target.to_dict(),
            degree=target.degree,
            steps=tr.steps,
            newton_failures=tr.failures,
            t_reached=t_reached,
            status=status,
            surplus=r,
        )
        final = QuadratureRule(
            interval=rule.interval,
            nodes=rule.nodes,
            weights=rule.weights,
            residual_norm=rule.residual_norm,
            meta=meta,
        )
        return TraceResult(
            rule=final,
            steps_taken=tr.steps,
            newton_failures=tr.failures,
            t_reached=t_reached,
            status=status,
        )

    def partial_rule() -> QuadratureRule:
        m = len(tr.x) // 2
        return QuadratureRule(
            interval=(a, b),
            nodes=tr.x[:m],
            weights=tr.x[m:],
            residual_norm=None,
        )

    def finish_reduced(force: bool = False) -> TraceResult:
        m = len(tr.x) // 2
        pre = QuadratureRule(interval=(a, b), nodes=tr.x[:m], weights=tr.x[m:])
        try:
            rule = finalize_limit(space_at(path, 1.0), pre, r, cfg, force=force)
        except NewtonFailure:
            tr.failures += 1
            return result(partial_rule(), "stalled", tr.t)
        rule = QuadratureRule(
            interval=rule.interval,
            nodes=rule.nodes,
            weights=rule.weights,
            residual_norm=residual_norm(target, rule),
            meta=rule.meta,
        )
        if not _valid_final(rule, target, cfg):
            return result(rule, "stalled", tr.t)
        return result(rule, "converged", 1.0)

    dt = cfg.initial_step
    while True:
        remaining = 1.0 - tr.t
        if r == 0:
            t_next = min(tr.t + dt, 1.0)
        else:
            if remaining <= _TAIL_GAP:
                return finish_reduced()
            if tr.t + dt >= 1.0 - _TAIL_GAP:
                # geometric approach keeps the full system regular while
                # the dying weights shrink toward the limit
                t_next = max(1.0 - 0.1 * remaining, tr.t + 0.5 * _TAIL_GAP)
            else:
                t_next = tr.t + dt
        try:
            nodes, weights, iters = tr.correct_at(t_next)
        except NewtonFailure:
            tr.failures += 1
            dt *= cfg.shrink
            if dt < cfg.min_step:
                if r > 0 and tr.t > _LATE_FAILURE_TIME:
                    return finish_reduced(force=True)
                return result(partial_rule(), "stalled", tr.t)
            continue
        tr.accept(t_next, nodes, weights)
        if iters <= 4:
            dt = min(dt * cfg.grow, cfg.max_step)
        if tr.t >= 1.0:
            return finish_reduced() if r > 0 else _finish_exact(tr, target, cfg, result)


def _finish_exact(tr: _Tracker, target, cfg, result) -> TraceResult:
    """Final state at t=1 with no surplus: the rule is already the root."""
    m = len(tr.x) // 2
    rule = QuadratureRule(
        interval=target.interval,
        nodes=tr.x[:m],
        weights=tr.x[m:],
    )
    rule = QuadratureRule(
        interval=rule.interval,
        nodes=rule.nodes,
        weights=rule.weights,
        residual_norm=residual_norm(target, rule),
        meta={},
    )
    if not _valid_final(rule, target, cfg):
        return result(rule, "stalled", tr.t)
    return result(rule, "converged", 1.0)


def _valid_final(
    rule: QuadratureRule, target: SplineSpace, cfg: TraceConfig
) -> bool:
    if rule.residual_norm is None or rule.residual_norm > 10 * cfg.newton_tol:
        return False
    if 2 * rule.num_nodes != target.dimension:
        return False
    if np.any(np.diff(rule.nodes) <= 0.0):
        return False
    if np.any(rule.weights <= 0.0):
        return False
    a, b = rule.interval
    return rule.nodes[0] >= a and rule.nodes[-1] <= b
