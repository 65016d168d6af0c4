"""Whale optimization algorithm: a population-based minimizer for
box-bounded continuous objectives.

Each search agent is a position vector. Per iteration every agent takes
exactly one of three moves, chosen by a random p and the magnitude of the
coefficient vector A:

* shrinking encircling (p < 0.5, all |A| components < 1): move toward the
  best-known position,  x' = x* - A * |C * x* - x|;
* random exploration (p < 0.5, some |A| component >= 1): the same update
  aimed at a uniformly chosen population member instead of the best;
* spiral attack (p >= 0.5): a logarithmic helix around the best position,
  x' = |x* - x| * exp(b*l) * cos(2*pi*l) + x*.

A and C are resampled per agent and per dimension (A = 2*a*r - a,
C = 2*r with r ~ U[0,1)), and the scale a decays linearly from 2 to 0
over the run, shifting the population from exploration to exploitation.
All products and absolute values are element-by-element.

Determinism contract: one RNG stream drives initialization, coefficient
sampling, and the exploration index draws, consumed in agent index order.
Fitness evaluations never touch the stream, so parallel evaluation yields
bit-identical runs.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DataError, NumericError

__all__ = [
    "WoaConfig",
    "WoaState",
    "UpdateCoefficients",
    "coefficient_a",
    "sample_coefficients",
    "encircle_update",
    "spiral_update",
    "explore_update",
    "clamp",
    "optimize",
    "save_history",
]


@dataclass(frozen=True, eq=False)
class WoaConfig:
    """Run parameters: population size, iteration budget, box bounds, the
    spiral shape constant b, and the RNG seed.

    Bounds may be given as scalars or per-dimension arrays; scalars are
    broadcast to every dimension.
    """

    population_size: int
    max_iterations: int
    dimension: int
    lower_bound: np.ndarray
    upper_bound: np.ndarray
    spiral_shape: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise DataError("population size must be >= 2")
        if self.max_iterations < 1:
            raise DataError("iteration budget must be >= 1")
        if self.dimension < 1:
            raise DataError("dimension must be >= 1")
        if not self.spiral_shape > 0:
            raise DataError("spiral shape constant must be > 0")
        lower = np.broadcast_to(
            np.asarray(self.lower_bound, dtype=float), (self.dimension,)
        ).copy()
        upper = np.broadcast_to(
            np.asarray(self.upper_bound, dtype=float), (self.dimension,)
        ).copy()
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise DataError("bounds must be finite")
        if not (lower < upper).all():
            raise DataError("every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower_bound", lower)
        object.__setattr__(self, "upper_bound", upper)


@dataclass(eq=False)
class WoaState:
    """Optimizer state after a run: final population, incumbent best, and
    the per-iteration best-fitness history."""

    iteration: int
    a: float
    positions: np.ndarray
    fitnesses: np.ndarray
    best_position: np.ndarray
    best_fitness: float
    history: list[float] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class UpdateCoefficients:
    """One agent's sampled move coefficients: vectors A and C, the spiral
    parameter l, and the branch variable p."""

    A: np.ndarray
    C: np.ndarray
    l: float
    p: float


def coefficient_a(t: int, max_iterations: int) -> float:
    """Linear 2 -> 0 schedule: a = 2 - 2t/T for iteration t in [0, T)."""
    if not 0 <= t < max_iterations:
        raise DataError(f"iteration {t} outside [0, {max_iterations})")
    return 2.0 - 2.0 * t / max_iterations


def sample_coefficients(a: float, dimension: int, rng) -> UpdateCoefficients:
    """Draw one agent's coefficients from the stream.

    Draw order is part of the determinism contract: r for A (dimension
    values), r for C (dimension values), then l ~ U[-1, 1], then p ~ U[0, 1).
    """
    r1 = rng.random(dimension)
    r2 = rng.random(dimension)
    A = 2.0 * a * r1 - a
    C = 2.0 * r2
    l = float(rng.uniform(-1.0, 1.0))
    p = float(rng.random())
    return UpdateCoefficients(A=A, C=C, l=l, p=p)


def encircle_update(
    x: np.ndarray, x_best: np.ndarray, A: np.ndarray, C: np.ndarray
) -> np.ndarray:
    """Move toward the best position: x* - A * |C * x* - x|, componentwise."""
    _check_same_dim(x, x_best)
    d = np.abs(C * x_best - x)
    return x_best - A * d


def spiral_update(x: np.ndarray, x_best: np.ndarray, b: float, l: float) -> np.ndarray:
    """Helix around the best position: |x* - x| * exp(b*l) * cos(2*pi*l) + x*."""
    _check_same_dim(x, x_best)
    d = np.abs(x_best - x)
    return d * np.exp(b * l) * np.cos(2.0 * np.pi * l) + x_best


def explore_update(
    x: np.ndarray, x_rand: np.ndarray, A: np.ndarray, C: np.ndarray
) -> np.ndarray:
    """Encircling update aimed at a random population member."""
    _check_same_dim(x, x_rand)
    d = np.abs(C * x_rand - x)
    return x_rand - A * d


def clamp(x: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Clip every component into its [lower, upper] interval."""
    return np.clip(x, lower, upper)


def _check_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise DataError(f"dimension mismatch: {x.shape} vs {y.shape}")


def _evaluate(objective, positions: np.ndarray, pool) -> np.ndarray:
    if pool is None:
        values = [objective(x) for x in positions]
    else:
        values = list(pool.map(objective, positions))
    fitnesses = np.asarray(values, dtype=float)
    if not np.isfinite(fitnesses).all():
        bad = int(np.flatnonzero(~np.isfinite(fitnesses))[0])
        raise NumericError(
            f"objective returned non-finite value {fitnesses[bad]} "
            f"for agent {bad} at position {positions[bad]!r}"
        )
    return fitnesses


def optimize(
    objective: Callable[[np.ndarray], float],
    config: WoaConfig,
    workers: int = 1,
    rng=None,
) -> WoaState:
    """Minimize the objective over the configured box.

    The objective must return a finite float for any in-bounds position
    and be safe to call from multiple threads; with workers > 1 the
    per-iteration fitness evaluations run on a thread pool without
    changing any result.

    The incumbent best is replaced only by strictly better fitness, so the
    returned history (one entry per iteration) never increases.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)

    lower, upper = config.lower_bound, config.upper_bound
    pop, dim = config.population_size, config.dimension

    positions = rng.uniform(lower, upper, size=(pop, dim))
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        fitnesses = _evaluate(objective, positions, pool)
        best_index = int(np.argmin(fitnesses))
        best_position = positions[best_index].copy()
        best_fitness = float(fitnesses[best_index])

        history: list[float] = []
        a = coefficient_a(0, config.max_iterations)
        for t in range(config.max_iterations):
            a = coefficient_a(t, config.max_iterations)
            new_positions = np.empty_like(positions)
            for i in range(pop):
                coeffs = sample_coefficients(a, dim, rng)
                if coeffs.p < 0.5:
                    if np.max(np.abs(coeffs.A)) < 1.0:
                        candidate = encircle_update(
                            positions[i], best_position, coeffs.A, coeffs.C
                        )
                    else:
                        j = int(rng.integers(pop))
                        candidate = explore_update(
                            positions[i], positions[j], coeffs.A, coeffs.C
                        )
                else:
                    candidate = spiral_update(
                        positions[i], best_position, config.spiral_shape, coeffs.l
                    )
                new_positions[i] = clamp(candidate, lower, upper)

            positions = new_positions
            fitnesses = _evaluate(objective, positions, pool)
            i_best = int(np.argmin(fitnesses))
            if fitnesses[i_best] < best_fitness:
                best_fitness = float(fitnesses[i_best])
                best_position = positions[i_best].copy()
            history.append(best_fitness)
    finally:
        if pool is not None:
            pool.shutdown()

    return WoaState(
        iteration=config.max_iterations,
        a=a,
        positions=positions,
        fitnesses=fitnesses,
        best_position=best_position,
        best_fitness=best_fitness,
        history=history,
    )


def save_history(history: list[float], path) -> None:
    """Write the convergence history as CSV: iteration,best_fitness."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("iteration,best_fitness\n")
        for t, value in enumerate(history, start=1):
            fh.write(f"{t},{value!r}\n")
