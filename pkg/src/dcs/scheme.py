"""Saved correction schemes: the selection plus everything needed to audit it.

A scheme file is self-describing JSON: the full function catalog, the
selected per-class indices, the objective weights and annealing schedule that
produced them, the achieved objective value, and a fingerprint of the
optimization dataset. Floats are written with ``repr`` precision, so save
followed by load reproduces every value bit-for-bit.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .annealing import AnnealConfig
from .corrections import FunctionSet, TriangularMembership, validate_selection
from .data import LabeledDataset
from .errors import ValidationError
from .objective import ObjectiveWeights

SCHEME_VERSION = 1


@dataclass(frozen=True)
class CorrectionScheme:
    """A portable, auditable per-class correction assignment."""

    catalog: FunctionSet
    selection: tuple[int, ...]
    objective: ObjectiveWeights
    anneal_config: AnnealConfig
    best_z: float
    dataset_num_instances: int
    dataset_num_classes: int
    dataset_sha256: str

    def __post_init__(self) -> None:
        entries = validate_selection(self.catalog, self.selection)
        object.__setattr__(self, "selection", entries)
        if self.dataset_num_classes != len(entries):
            raise ValidationError(
                f"selection covers {len(entries)} classes but the dataset "
                f"fingerprint says {self.dataset_num_classes}"
            )

    @property
    def num_classes(self) -> int:
        return len(self.selection)

    def matches_dataset(self, ds: LabeledDataset) -> bool:
        """True when ``ds`` is byte-identical to the optimization set."""
        return (
            ds.num_instances == self.dataset_num_instances
            and ds.num_classes == self.dataset_num_classes
            and ds.fingerprint() == self.dataset_sha256
        )

    def to_dict(self) -> dict:
        return {
            "version": SCHEME_VERSION,
            "num_classes": self.num_classes,
            "catalog": {
                "memberships": [
                    {"a": f.a, "b": f.b, "c": f.c}
                    for f in self.catalog.memberships
                ],
                "num_weights": self.catalog.num_weights,
            },
            "selection": list(self.selection),
            "objective": {
                "beta": self.objective.beta,
                "tau": self.objective.tau,
                "enable_err": self.objective.enable_err,
                "enable_cobias": self.objective.enable_cobias,
                "enable_pmi": self.objective.enable_pmi,
            },
            "anneal_config": {
                "seed": self.anneal_config.seed,
                "initial_temperature": self.anneal_config.initial_temperature,
                "cooling_rate": self.anneal_config.cooling_rate,
                "lambda1": self.anneal_config.lambda1,
                "lambda2": self.anneal_config.lambda2,
                "min_temperature": self.anneal_config.min_temperature,
                "max_outer_loops": self.anneal_config.max_outer_loops,
            },
            "best_z": self.best_z,
            "dataset_fingerprint": {
                "num_instances": self.dataset_num_instances,
                "num_classes": self.dataset_num_classes,
                "sha256": self.dataset_sha256,
            },
        }


def save_scheme(scheme: CorrectionScheme, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(scheme.to_dict(), fh, indent=2)
        fh.write("\n")


def load_scheme(path: str | Path) -> CorrectionScheme:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON: {exc}") from None
    try:
        if payload["version"] != SCHEME_VERSION:
            raise ValidationError(
                f"{path}: unsupported scheme version {payload['version']!r}"
            )
        catalog = FunctionSet(
            memberships=tuple(
                TriangularMembership(float(m["a"]), float(m["b"]), float(m["c"]))
                for m in payload["catalog"]["memberships"]
            ),
            num_weights=int(payload["catalog"]["num_weights"]),
        )
        obj = payload["objective"]
        cfg = payload["anneal_config"]
        fp = payload["dataset_fingerprint"]
        return CorrectionScheme(
            catalog=catalog,
            selection=tuple(int(k) for k in payload["selection"]),
            objective=ObjectiveWeights(
                beta=float(obj["beta"]),
                tau=float(obj["tau"]),
                enable_err=bool(obj["enable_err"]),
                enable_cobias=bool(obj["enable_cobias"]),
                enable_pmi=bool(obj["enable_pmi"]),
            ),
            anneal_config=AnnealConfig(
                seed=int(cfg["seed"]),
                initial_temperature=float(cfg["initial_temperature"]),
                cooling_rate=float(cfg["cooling_rate"]),
                lambda1=float(cfg["lambda1"]),
                lambda2=float(cfg["lambda2"]),
                min_temperature=float(cfg["min_temperature"]),
                max_outer_loops=int(cfg["max_outer_loops"]),
            ),
            best_z=float(payload["best_z"]),
            dataset_num_instances=int(fp["num_instances"]),
            dataset_num_classes=int(fp["num_classes"]),
            dataset_sha256=str(fp["sha256"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"{path}: malformed scheme file: {exc}") from None
