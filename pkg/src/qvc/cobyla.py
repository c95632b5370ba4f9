"""Derivative-free minimization by linear approximation (COBYLA).

Maintains a nondegenerate simplex of ``dim + 1`` points, interpolates a
linear surrogate of the objective, and steps within a trust radius ``rho``
that shrinks from ``rho_begin`` to ``rho_end``. Simplex acceptability
(vertex distances and face heights relative to ``rho``) is guarded with
dedicated geometry steps; a degenerate simplex is repaired by re-anchoring
its worst vertex along the least-explored direction.

The classifier objective is unconstrained, so no constraint surrogates are
carried; everything else follows Powell's scheme, including the 0.25 / 2.1
acceptability factors and the halving rho schedule.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

log = logging.getLogger(__name__)

_ALPHA = 0.25  # lower bound on face heights, in units of rho
_BETA = 2.1  # upper bound on vertex distances, in units of rho
_GEOMETRY_STEP = 0.5  # re-anchor distance, in units of rho


@dataclass(frozen=True)
class OptimizerConfig:
    max_iterations: int = 400  # objective evaluations, not outer cycles
    rho_begin: float = 1.0
    rho_end: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ConfigurationError("max_iterations must be >= 1")
        if not (0 < self.rho_end < self.rho_begin):
            raise ConfigurationError("need 0 < rho_end < rho_begin")


@dataclass
class OptimizationResult:
    best_theta: np.ndarray
    best_value: float
    evaluations_used: int
    converged: bool
    trace: list[tuple[int, float, float]] = field(default_factory=list, repr=False)


class _StopSearch(Exception):
    pass


def initial_theta(num_params: int, seed: int) -> np.ndarray:
    """Uniform draw from [-pi, pi]^num_params, deterministic in the seed."""
    if num_params < 1:
        raise ConfigurationError("num_params must be >= 1")
    rng = np.random.default_rng(seed)
    return rng.uniform(-math.pi, math.pi, size=num_params)


def minimize(
    objective,
    initial,
    config: OptimizerConfig = OptimizerConfig(),
    trace_path=None,
) -> OptimizationResult:
    """Minimize ``objective`` from ``initial`` within the evaluation budget.

    Returns the best point seen across all evaluations (monotone by
    construction). A non-finite objective value aborts the search with a
    diagnostic and returns the best point so far.
    """
    x0 = np.asarray(initial, dtype=float).copy()
    if x0.ndim != 1 or x0.size < 1:
        raise ConfigurationError("initial point must be a non-empty 1-D vector")
    n = x0.size
    budget = config.max_iterations

    rho = config.rho_begin
    evals = 0
    best_x = x0.copy()
    best_f = math.inf
    trace: list[tuple[int, float, float]] = []
    converged = False

    def evaluate(x: np.ndarray) -> float:
        nonlocal evals, best_x, best_f
        if evals >= budget:
            raise _StopSearch
        value = float(objective(x.copy()))
        evals += 1
        if not math.isfinite(value):
            log.warning(
                "objective returned a non-finite value (%r) at evaluation %d; "
                "aborting with best-so-far",
                value,
                evals,
            )
            raise _StopSearch
        if value < best_f:
            best_f = value
            best_x = x.copy()
        trace.append((evals, rho, best_f))
        return value

    try:
        # Initial simplex: x0 plus one offset per coordinate at distance rho.
        xs = np.tile(x0, (n + 1, 1))
        fs = np.empty(n + 1)
        fs[0] = evaluate(xs[0])
        for i in range(n):
            xs[i + 1, i] += rho
            fs[i + 1] = evaluate(xs[i + 1])

        while True:
            j_best = int(np.argmin(fs))
            if j_best != 0:
                xs[[0, j_best]] = xs[[j_best, 0]]
                fs[[0, j_best]] = fs[[j_best, 0]]

            edges = xs[1:] - xs[0]  # rows: vertex j -> edge vector
            values = fs[1:] - fs[0]
            grad = np.linalg.lstsq(edges, values, rcond=None)[0]
            face_normals = np.linalg.pinv(edges)  # column j ~ normal of face j
            with np.errstate(divide="ignore"):
                heights = 1.0 / np.linalg.norm(face_normals, axis=0)
            distances = np.linalg.norm(edges, axis=1)

            if np.any(distances > _BETA * rho) or np.any(heights < _ALPHA * rho):
                _geometry_step(xs, fs, grad, face_normals, heights, distances, rho, evaluate)
                continue

            grad_norm = float(np.linalg.norm(grad))
            improved = False
            if grad_norm > 0:
                step = -(rho / grad_norm) * grad
                x_new = xs[0] + step
                f_new = evaluate(x_new)
                predicted = rho * grad_norm
                actual = fs[0] - f_new
                j_drop = _vertex_to_drop(face_normals, step, distances, rho)
                if f_new < fs[j_drop]:
                    xs[j_drop] = x_new
                    fs[j_drop] = f_new
                improved = actual > 0.1 * predicted
            if improved:
                continue
            # No useful progress at this radius and geometry is fine: shrink.
            if rho <= config.rho_end:
                converged = True
                break
            rho = max(0.5 * rho, config.rho_end)
            if rho <= 1.5 * config.rho_end:
                rho = config.rho_end
    except _StopSearch:
        pass

    if trace_path is not None:
        _write_trace(trace_path, trace)
    return OptimizationResult(best_x, best_f, evals, converged, trace)


def _geometry_step(xs, fs, grad, face_normals, heights, distances, rho, evaluate):
    """Re-anchor the worst vertex at distance rho/2 from the best one."""
    # Index j runs over vertices 1..n; row/column j of the geometry arrays
    # describes vertex j + 1.
    if np.any(distances > _BETA * rho):
        j = int(np.argmax(distances))
    else:
        j = int(np.argmin(heights))
    normal = face_normals[:, j]
    norm = np.linalg.norm(normal)
    if norm > 0 and np.isfinite(norm):
        direction = normal / norm
    else:
        # Fully degenerate simplex: take the least-explored direction.
        _, _, vt = np.linalg.svd(xs[1:] - xs[0])
        direction = vt[-1]
        j = int(np.argmax(distances))
    if float(grad @ direction) > 0:
        direction = -direction
    x_new = xs[0] + _GEOMETRY_STEP * rho * direction
    fs[j + 1] = evaluate(x_new)
    xs[j + 1] = x_new


def _vertex_to_drop(face_normals, step, distances, rho) -> int:
    """Vertex whose replacement by the trust-region point keeps volume best.

    ``|normal_j . step|`` is the volume ratio after the swap; far-away
    vertices are preferred for removal.
    """
    weights = np.abs(face_normals.T @ step) * np.maximum(
        1.0, (distances / rho) ** 2
    )
    return int(np.argmax(weights)) + 1


def _write_trace(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "rho", "best_value"])
        writer.writerows((i, repr(r), repr(b)) for i, r, b in rows)
