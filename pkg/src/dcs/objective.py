"""Objective terms scored on corrected predictions.

The score of a selection xi on a labeled dataset is

    Z = Z_err + beta * Z_imbalance + tau * Z_pmi

where Z_err is the overall error rate of the corrected argmax predictions,
Z_imbalance is the mean absolute pairwise difference of per-class accuracies
over classes present in the labels, and Z_pmi is the negated sum over present
classes of the pointwise mutual information between "predicted j" and
"labeled j" events. Each term can be disabled, in which case it contributes
exactly 0; at least one must stay enabled.

Predicted labels are 1-based argmaxes of the corrected probability rows, ties
broken toward the lowest class index. Natural logarithms throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corrections import FunctionSet, validate_selection
from .data import LabeledDataset
from .errors import PreconditionError, ValidationError

PMI_EPSILON = 1e-12


@dataclass(frozen=True)
class ObjectiveWeights:
    """Term weights and enable flags for the combined objective."""

    beta: float = 1.0
    tau: float = 1.0
    enable_err: bool = True
    enable_cobias: bool = True
    enable_pmi: bool = True

    def __post_init__(self) -> None:
        if not (self.enable_err or self.enable_cobias or self.enable_pmi):
            raise ValidationError("at least one objective term must be enabled")
        if self.beta < 0.0 or self.tau < 0.0:
            raise ValidationError("beta and tau must be non-negative")

    @classmethod
    def from_mode(
        cls, mode: str, beta: float = 1.0, tau: float = 1.0
    ) -> "ObjectiveWeights":
        """Build weights for an ablation mode: full, err, or err+pmi."""
        if mode == "full":
            return cls(beta=beta, tau=tau)
        if mode == "err":
            return cls(beta=0.0, tau=0.0, enable_cobias=False, enable_pmi=False)
        if mode == "err+pmi":
            return cls(beta=0.0, tau=tau, enable_cobias=False)
        raise ValidationError(f"unknown objective mode {mode!r}")


def corrected_matrix(
    ds: LabeledDataset, fs: FunctionSet, xi
) -> np.ndarray:
    """Apply the selection to every row: column i goes through function xi[i]."""
    entries = validate_selection(fs, xi, num_classes=ds.num_classes)
    out = np.empty_like(ds.probabilities)
    for i, k in enumerate(entries):
        out[:, i] = fs.apply_index(k, ds.probabilities[:, i])
    return out


def predict(ds: LabeledDataset, fs: FunctionSet, xi) -> np.ndarray:
    """1-based argmax labels of the corrected rows, ties to the lowest index."""
    return np.argmax(corrected_matrix(ds, fs, xi), axis=1).astype(np.int64) + 1


def z_err(predictions: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of instances whose prediction differs from the label."""
    preds = np.asarray(predictions)
    labels = np.asarray(labels)
    if preds.shape != labels.shape:
        raise ValidationError(
            f"predictions shape {preds.shape} differs from labels "
            f"shape {labels.shape}"
        )
    return float(np.mean(preds != labels))


def per_class_accuracy(
    predictions: np.ndarray, labels: np.ndarray, num_classes: int
) -> np.ndarray:
    """Accuracy per class over its true instances; NaN for absent classes."""
    preds = np.asarray(predictions)
    labels = np.asarray(labels)
    true_counts = np.bincount(labels, minlength=num_classes + 1)[1:]
    correct = np.bincount(
        labels[preds == labels], minlength=num_classes + 1
    )[1:]
    with np.errstate(invalid="ignore"):
        return correct / true_counts


def z_cobias(
    predictions: np.ndarray, labels: np.ndarray, num_classes: int
) -> float:
    """Mean absolute accuracy difference over pairs of present classes."""
    acc = per_class_accuracy(predictions, labels, num_classes)
    vals = acc[~np.isnan(acc)]
    k = vals.shape[0]
    if k < 2:
        raise PreconditionError(
            "accuracy-imbalance term needs at least two classes present"
        )
    iu, ju = np.triu_indices(k, 1)
    return float(np.sum(np.abs(vals[iu] - vals[ju])) / (k * (k - 1) // 2))


def z_pmi(
    predictions: np.ndarray, labels: np.ndarray, num_classes: int
) -> float:
    """Negated sum of per-class prediction/label PMI over present classes.

    PMI_j = ln( (correct_j / M) / ((predicted_j / M) * (true_j / M)) ). A
    class with true instances but no correct predictions would make the
    numerator 0, so its PMI is floored at ln(PMI_EPSILON); this makes never
    predicting a present class expensive rather than undefined.
    """
    preds = np.asarray(predictions)
    labels = np.asarray(labels)
    m = labels.shape[0]
    true_counts = np.bincount(labels, minlength=num_classes + 1)[1:]
    pred_counts = np.bincount(preds, minlength=num_classes + 1)[1:]
    correct = np.bincount(
        labels[preds == labels], minlength=num_classes + 1
    )[1:]
    total = 0.0
    for j in range(num_classes):
        if true_counts[j] == 0:
            continue
        if correct[j] == 0:
            total += math.log(PMI_EPSILON)
        else:
            total += math.log(
                (correct[j] / m)
                / ((pred_counts[j] / m) * (true_counts[j] / m))
            )
    return -total


def combine_terms(
    err: float, cobias: float | None, pmi: float | None, w: ObjectiveWeights
) -> float:
    """Weighted sum of the enabled terms, in a fixed order."""
    z = 0.0
    if w.enable_err:
        z = z + err
    if w.enable_cobias:
        z = z + w.beta * cobias
    if w.enable_pmi:
        z = z + w.tau * pmi
    return z


def score_predictions(
    predictions: np.ndarray,
    labels: np.ndarray,
    num_classes: int,
    w: ObjectiveWeights,
) -> float:
    """Objective value of fixed predictions; only enabled terms are computed."""
    err = z_err(predictions, labels) if w.enable_err else 0.0
    cb = z_cobias(predictions, labels, num_classes) if w.enable_cobias else None
    pmi = z_pmi(predictions, labels, num_classes) if w.enable_pmi else None
    return combine_terms(err, cb, pmi, w)


def objective_value(
    ds: LabeledDataset, fs: FunctionSet, xi, w: ObjectiveWeights
) -> float:
    """Z for one selection on one dataset. Deterministic, no randomness."""
    preds = predict(ds, fs, xi)
    return score_predictions(preds, ds.labels, ds.num_classes, w)


class ObjectiveEvaluator:
    """Scores many selections over one dataset without recomputing columns.

    Every (class, function-index) corrected column is computed once up front;
    a candidate evaluation then only gathers columns, takes the argmax, and
    counts. Values are bit-identical to ``objective_value`` because the same
    column arithmetic and the same scoring code run in both paths.
    """

    def __init__(
        self, ds: LabeledDataset, fs: FunctionSet, w: ObjectiveWeights
    ) -> None:
        self._labels = ds.labels
        self._num_classes = ds.num_classes
        self._num_instances = ds.num_instances
        self._weights = w
        self._catalog_size = fs.size
        # stacked (D_F + D_W, M) corrected columns, one stack per class
        self._columns = [
            np.stack(
                [
                    fs.apply_index(k, ds.probabilities[:, i])
                    for k in range(1, fs.size + 1)
                ]
            )
            for i in range(ds.num_classes)
        ]

    @property
    def num_classes(self) -> int:
        return self._num_classes

    def predictions(self, xi) -> np.ndarray:
        corrected = np.empty(
            (self._num_instances, self._num_classes), dtype=np.float64
        )
        for i, k in enumerate(xi):
            corrected[:, i] = self._columns[i][k - 1]
        return np.argmax(corrected, axis=1).astype(np.int64) + 1

    def value(self, xi) -> float:
        return score_predictions(
            self.predictions(xi), self._labels, self._num_classes, self._weights
        )


@dataclass(frozen=True)
class EvalReport:
    """Evaluation summary of one selection (or raw baseline) on one dataset."""

    overall_accuracy: float
    err: float
    per_class_accuracy: tuple[float | None, ...]
    class_counts: tuple[int, ...]
    cobias: float | None
    pmi_sum: float
    z_value: float
    beta: float
    tau: float
    enabled_terms: tuple[str, ...]
    correction_kinds: tuple[str, ...] | None = None
    correction_params: tuple[dict, ...] | None = None

    def to_dict(self) -> dict:
        return {
            "overall_accuracy": self.overall_accuracy,
            "err": self.err,
            "per_class_accuracy": list(self.per_class_accuracy),
            "class_counts": list(self.class_counts),
            "cobias": self.cobias,
            "pmi_sum": self.pmi_sum,
            "z_value": self.z_value,
            "beta": self.beta,
            "tau": self.tau,
            "enabled_terms": list(self.enabled_terms),
            "correction_kinds": (
                None
                if self.correction_kinds is None
                else list(self.correction_kinds)
            ),
            "correction_params": (
                None
                if self.correction_params is None
                else list(self.correction_params)
            ),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "EvalReport":
        return cls(
            overall_accuracy=payload["overall_accuracy"],
            err=payload["err"],
            per_class_accuracy=tuple(payload["per_class_accuracy"]),
            class_counts=tuple(payload["class_counts"]),
            cobias=payload["cobias"],
            pmi_sum=payload["pmi_sum"],
            z_value=payload["z_value"],
            beta=payload["beta"],
            tau=payload["tau"],
            enabled_terms=tuple(payload["enabled_terms"]),
            correction_kinds=(
                None
                if payload["correction_kinds"] is None
                else tuple(payload["correction_kinds"])
            ),
            correction_params=(
                None
                if payload["correction_params"] is None
                else tuple(payload["correction_params"])
            ),
        )


def evaluate(
    ds: LabeledDataset,
    fs: FunctionSet,
    xi,
    w: ObjectiveWeights,
    attach_scheme: bool = True,
) -> EvalReport:
    """Full report for one selection: accuracies, imbalance, PMI, and Z.

    The imbalance and PMI components are reported whenever defined, even if
    disabled in ``w``; ``z_value`` only sums the enabled terms. Overall
    accuracy is defined as 1 - err so the two always sum to 1 exactly.
    """
    entries = validate_selection(fs, xi, num_classes=ds.num_classes)
    preds = predict(ds, fs, entries)
    err = z_err(preds, ds.labels)
    acc_arr = per_class_accuracy(preds, ds.labels, ds.num_classes)
    present = ~np.isnan(acc_arr)
    if present.sum() >= 2:
        cb = z_cobias(preds, ds.labels, ds.num_classes)
    elif w.enable_cobias:
        raise PreconditionError(
            "accuracy-imbalance term needs at least two classes present"
        )
    else:
        cb = None
    pmi = z_pmi(preds, ds.labels, ds.num_classes)
    z = combine_terms(err, cb, pmi, w)
    enabled = tuple(
        name
        for name, on in (
            ("err", w.enable_err),
            ("cobias", w.enable_cobias),
            ("pmi", w.enable_pmi),
        )
        if on
    )
    true_counts = np.bincount(ds.labels, minlength=ds.num_classes + 1)[1:]
    kinds = params = None
    if attach_scheme:
        kinds = tuple(fs.index_kind(k) for k in entries)
        params = tuple(fs.describe_index(k) for k in entries)
    return EvalReport(
        overall_accuracy=1.0 - err,
        err=err,
        per_class_accuracy=tuple(
            float(a) if not np.isnan(a) else None for a in acc_arr
        ),
        class_counts=tuple(int(t) for t in true_counts),
        cobias=cb,
        pmi_sum=pmi,
        z_value=z,
        beta=w.beta,
        tau=w.tau,
        enabled_terms=enabled,
        correction_kinds=kinds,
        correction_params=params,
    )
