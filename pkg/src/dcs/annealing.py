"""Simulated annealing over per-class correction-function selections.

The search space is the set of selection vectors xi in {1..D}^N where D is
the catalog size (optionally restricted to an allowed index subset). The
chain starts from the all-Don't-Change vector, proposes single-coordinate
resamples, and accepts with the Metropolis rule at a geometrically cooled
temperature. The best selection ever evaluated is tracked separately from
the chain and returned.

Randomness comes from three independent PCG64 streams spawned from the one
seed, consumed in a fixed role order: coordinate choice, replacement value
choice, acceptance draw. This keeps runs bit-reproducible for a given seed
on any platform.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .corrections import FunctionSet
from .data import LabeledDataset
from .errors import PreconditionError
from .objective import ObjectiveEvaluator, ObjectiveWeights, objective_value


@dataclass(frozen=True)
class AnnealConfig:
    """Cooling schedule and stopping parameters.

    The inner loop at temperature T_t = initial_temperature * cooling_rate**t
    ends once ceil(lambda1 * N) candidates were accepted or
    ceil(lambda2 * N) were generated; the outer loop ends when the
    temperature falls below min_temperature or after max_outer_loops rounds.
    """

    seed: int
    initial_temperature: float = 200_000.0
    cooling_rate: float = 0.95
    lambda1: float = 10.0
    lambda2: float = 100.0
    min_temperature: float = 1e-2
    max_outer_loops: int = 150

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise PreconditionError("seed must be a non-negative integer")
        if self.initial_temperature <= 0.0:
            raise PreconditionError("initial_temperature must be positive")
        if not 0.0 < self.cooling_rate < 1.0:
            raise PreconditionError("cooling_rate must lie in (0, 1)")
        if self.lambda1 <= 0.0 or self.lambda2 <= 0.0:
            raise PreconditionError("lambda1 and lambda2 must be positive")
        if self.lambda2 < self.lambda1:
            raise PreconditionError("lambda2 must be at least lambda1")
        if self.min_temperature <= 0.0:
            raise PreconditionError("min_temperature must be positive")
        if self.min_temperature >= self.initial_temperature:
            raise PreconditionError(
                "min_temperature must be below initial_temperature"
            )
        if self.max_outer_loops < 1:
            raise PreconditionError("max_outer_loops must be at least 1")


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one annealing run."""

    best_xi: tuple[int, ...]
    best_z: float
    z_trace: tuple[float, ...]
    temperatures: tuple[float, ...]
    acceptance_counts: tuple[tuple[int, int], ...]
    outer_loops_run: int
    wall_time: float

    def to_dict(self) -> dict:
        return {
            "best_xi": list(self.best_xi),
            "best_z": self.best_z,
            "z_trace": list(self.z_trace),
            "temperatures": list(self.temperatures),
            "acceptance_counts": [list(pair) for pair in self.acceptance_counts],
            "outer_loops_run": self.outer_loops_run,
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "SolveResult":
        return cls(
            best_xi=tuple(int(k) for k in payload["best_xi"]),
            best_z=float(payload["best_z"]),
            z_trace=tuple(float(z) for z in payload["z_trace"]),
            temperatures=tuple(float(t) for t in payload["temperatures"]),
            acceptance_counts=tuple(
                (int(g), int(a)) for g, a in payload["acceptance_counts"]
            ),
            outer_loops_run=int(payload["outer_loops_run"]),
            wall_time=float(payload["wall_time"]),
        )

    def trace_rows(self):
        """(outer_loop, temperature, best_z, generated, accepted) tuples."""
        for t in range(self.outer_loops_run):
            g, a = self.acceptance_counts[t]
            yield t, self.temperatures[t], self.z_trace[t], g, a


def initial_solution(fs: FunctionSet, num_classes: int) -> tuple[int, ...]:
    """Every class starts on Don't Change, so the start equals the raw model."""
    if num_classes < 1:
        raise PreconditionError("need at least one class")
    return (fs.dont_change_index,) * num_classes


def neighbor(xi, domain, coord_rng, value_rng) -> tuple[int, ...]:
    """Resample one uniformly chosen coordinate to a different allowed value.

    ``domain`` is either the catalog size D (meaning indices 1..D) or an
    explicit sequence of allowed indices. The replacement is uniform over the
    allowed values excluding the coordinate's current one, so the result is
    always at Hamming distance exactly 1 from ``xi``.
    """
    values = (
        tuple(range(1, domain + 1)) if isinstance(domain, int) else tuple(domain)
    )
    if len(values) < 2:
        raise PreconditionError("neighbor needs at least two allowed indices")
    xi = tuple(xi)
    j = int(coord_rng.integers(len(xi)))
    choices = [k for k in values if k != xi[j]]
    replacement = choices[int(value_rng.integers(len(choices)))]
    return xi[:j] + (replacement,) + xi[j + 1 :]


def accept(delta_z: float, temperature: float, rng) -> bool:
    """Metropolis rule: improvements always pass, otherwise with
    probability exp(-delta_z / temperature)."""
    if temperature <= 0.0:
        raise PreconditionError("temperature must be positive")
    if delta_z < 0.0:
        return True
    return rng.random() < math.exp(-delta_z / temperature)


def make_streams(seed: int):
    """The three named RNG streams: (coordinate, value, acceptance)."""
    children = np.random.SeedSequence(seed).spawn(3)
    return tuple(np.random.default_rng(child) for child in children)


def anneal(
    ds: LabeledDataset,
    fs: FunctionSet,
    weights: ObjectiveWeights,
    config: AnnealConfig,
    allowed_indices=None,
) -> SolveResult:
    """Minimize the objective over selection vectors for ``ds``.

    ``allowed_indices`` restricts the search domain to a subset of catalog
    indices (it must contain the Don't Change index, which seeds the chain);
    None searches the full catalog. The returned best_z is recomputed from
    best_xi through the plain objective path, so it always equals
    ``objective_value(ds, fs, best_xi, weights)``.
    """
    n = ds.num_classes
    present = np.unique(ds.labels).shape[0]
    if present < 2:
        raise PreconditionError(
            f"annealing needs at least two classes present, found {present}"
        )
    if allowed_indices is None:
        allowed = tuple(range(1, fs.size + 1))
    else:
        allowed = tuple(sorted(set(int(k) for k in allowed_indices)))
        if any(k < 1 or k > fs.size for k in allowed):
            raise PreconditionError(
                f"allowed indices must lie in 1..{fs.size}"
            )
    if fs.dont_change_index not in allowed:
        raise PreconditionError(
            "allowed indices must include the Don't Change index"
        )
    if len(allowed) < 2:
        raise PreconditionError("need at least two allowed indices")

    coord_rng, value_rng, accept_rng = make_streams(config.seed)
    evaluator = ObjectiveEvaluator(ds, fs, weights)

    current = initial_solution(fs, n)
    current_z = evaluator.value(current)
    best, best_z = current, current_z

    accepted_cap = math.ceil(config.lambda1 * n)
    generated_cap = math.ceil(config.lambda2 * n)

    z_trace: list[float] = []
    temperatures: list[float] = []
    counts: list[tuple[int, int]] = []
    start = time.perf_counter()
    outer = 0
    for t in range(config.max_outer_loops):
        # closed form, not iterated multiplication: T_t = T0 * alpha**t
        temperature = config.initial_temperature * config.cooling_rate**t
        if temperature < config.min_temperature:
            break
        generated = 0
        accepted = 0
        while accepted < accepted_cap and generated < generated_cap:
            candidate = neighbor(current, allowed, coord_rng, value_rng)
            candidate_z = evaluator.value(candidate)
            generated += 1
            if candidate_z < best_z:
                best, best_z = candidate, candidate_z
            if accept(candidate_z - current_z, temperature, accept_rng):
                current, current_z = candidate, candidate_z
                accepted += 1
        z_trace.append(best_z)
        temperatures.append(temperature)
        counts.append((generated, accepted))
        outer += 1
    wall = time.perf_counter() - start

    return SolveResult(
        best_xi=best,
        best_z=objective_value(ds, fs, best, weights),
        z_trace=tuple(z_trace),
        temperatures=tuple(temperatures),
        acceptance_counts=tuple(counts),
        outer_loops_run=outer,
        wall_time=wall,
    )
