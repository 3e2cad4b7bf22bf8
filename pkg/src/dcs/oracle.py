"""Exhaustive search over selection vectors, used as a ground-truth check.

Enumerates the full cartesian product of allowed indices in lexicographic
order and scores every vector with the same cached evaluator the annealer
uses, so values are bit-comparable. Intended for small instances; the space
size is guarded by an explicit limit.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .corrections import FunctionSet
from .data import LabeledDataset
from .errors import PreconditionError
from .objective import ObjectiveEvaluator, ObjectiveWeights


@dataclass(frozen=True)
class OracleResult:
    best_xi: tuple[int, ...]
    best_z: float
    num_evaluated: int
    ties: int

    def to_dict(self) -> dict:
        return {
            "best_xi": list(self.best_xi),
            "best_z": self.best_z,
            "num_evaluated": self.num_evaluated,
            "ties": self.ties,
        }


def exhaustive_search(
    ds: LabeledDataset,
    fs: FunctionSet,
    weights: ObjectiveWeights,
    limit: int = 1_000_000,
    allowed_indices=None,
) -> OracleResult:
    """Score every selection vector and return the first-encountered minimum.

    ``ties`` counts all vectors whose score exactly equals the minimum
    (including the winner itself). ``num_evaluated`` is |allowed|**N, the
    whole space. Raises PreconditionError when that exceeds ``limit``.
    """
    n = ds.num_classes
    if allowed_indices is None:
        allowed = tuple(range(1, fs.size + 1))
    else:
        allowed = tuple(sorted(set(int(k) for k in allowed_indices)))
        if any(k < 1 or k > fs.size for k in allowed):
            raise PreconditionError(f"allowed indices must lie in 1..{fs.size}")
        if not allowed:
            raise PreconditionError("allowed index set is empty")
    space = len(allowed) ** n
    if space > limit:
        raise PreconditionError(
            f"search space {len(allowed)}^{n} = {space} exceeds limit {limit}"
        )
    evaluator = ObjectiveEvaluator(ds, fs, weights)
    best_xi: tuple[int, ...] | None = None
    best_z = float("inf")
    ties = 0
    count = 0
    for xi in itertools.product(allowed, repeat=n):
        z = evaluator.value(xi)
        count += 1
        if z < best_z:
            best_xi, best_z, ties = xi, z, 1
        elif z == best_z:
            ties += 1
    assert best_xi is not None
    return OracleResult(
        best_xi=best_xi, best_z=best_z, num_evaluated=count, ties=ties
    )
