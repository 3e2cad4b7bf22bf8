"""Correction-function catalog and its step-gated per-class application.

A catalog holds D_F triangular membership functions followed by D_W linear
weight coefficients. A selection assigns every class one 1-based index k into
the combined list: k <= D_F picks the membership mu_k, k > D_F picks the
weight coefficient (k - D_F) / D_W. Applied to a probability p in [0, 1]:

* membership: mu(p) rises linearly from a to b, falls linearly from b to c,
  and is 0 outside [a, c]; the a = b = 0 shoulder is (c - p) / c on [0, c]
  and the b = c = 1 shoulder is (p - a) / (1 - a) on [a, 1].
* weight: omega(p) = ((k - D_F) / D_W) * p.

Exactly one of the two branches fires for each index; the routing is the pair
of unit-step gates ``step(D_F - k)`` and ``step(k - D_F - 1)``, which sum to 1
for every valid k. The membership (0, 1, 1) is the mandatory "Don't Change"
element: it maps every p to itself bit-for-bit, so selecting it leaves a
class untouched.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError


def heaviside(x: float) -> int:
    """Unit step: 1 for x >= 0, else 0."""
    return 1 if x >= 0 else 0


@dataclass(frozen=True)
class TriangularMembership:
    """Triangle vertices 0 <= a <= b <= c <= 1, not all equal."""

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.a <= self.b <= self.c <= 1.0):
            raise ValidationError(
                f"membership vertices must satisfy 0 <= a <= b <= c <= 1, "
                f"got ({self.a}, {self.b}, {self.c})"
            )
        if self.a == self.b == self.c:
            raise ValidationError(
                f"degenerate membership with a = b = c = {self.a}"
            )

    @property
    def is_dont_change(self) -> bool:
        return self.a == 0.0 and self.b == 1.0 and self.c == 1.0


def _check_unit_range(p: np.ndarray) -> None:
    if p.size and (np.min(p) < 0.0 or np.max(p) > 1.0):
        raise ValidationError("probability outside [0, 1]")


def _membership_array(f: TriangularMembership, p: np.ndarray) -> np.ndarray:
    a, b, c = f.a, f.b, f.c
    out = np.zeros_like(p)
    if a == 0.0 and b == 0.0:
        m = p <= c
        out[m] = (c - p[m]) / c
    elif b == 1.0 and c == 1.0:
        m = p >= a
        out[m] = (p[m] - a) / (1.0 - a)
    else:
        if b > a:
            m = (p > a) & (p <= b)
            out[m] = (p[m] - a) / (b - a)
        if c > b:
            m = (p > b) & (p <= c)
            out[m] = (c - p[m]) / (c - b)
    return out


def eval_membership(f: TriangularMembership, p):
    """Evaluate mu_f at ``p`` (scalar or array of values in [0, 1]).

    Output is always in [0, 1]. The shoulder special cases keep the curve
    continuous at the pinned ends: a = b = 0 gives mu(0) = 1 and b = c = 1
    gives mu(1) = 1.
    """
    scalar = np.ndim(p) == 0
    arr = np.atleast_1d(np.asarray(p, dtype=np.float64))
    _check_unit_range(arr)
    out = _membership_array(f, arr)
    return float(out[0]) if scalar else out


def eval_weight(k: int, num_memberships: int, num_weights: int, p):
    """Evaluate the weight coefficient for index k: ((k - D_F) / D_W) * p."""
    if not num_memberships + 1 <= k <= num_memberships + num_weights:
        raise ValidationError(
            f"weight index {k} outside "
            f"{num_memberships + 1}..{num_memberships + num_weights}"
        )
    scalar = np.ndim(p) == 0
    arr = np.atleast_1d(np.asarray(p, dtype=np.float64))
    _check_unit_range(arr)
    factor = (k - num_memberships) / num_weights
    out = factor * arr
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class FunctionSet:
    """An ordered catalog of D_F memberships plus D_W weight coefficients.

    Indices are 1-based: 1..D_F address memberships in order, D_F+1..D_F+D_W
    address the weight coefficients 1/D_W, 2/D_W, ..., 1. The catalog must
    contain the Don't Change membership (0, 1, 1), located by exact match.
    """

    memberships: tuple[TriangularMembership, ...]
    num_weights: int

    def __post_init__(self) -> None:
        memberships = tuple(self.memberships)
        object.__setattr__(self, "memberships", memberships)
        if not memberships:
            raise ValidationError("catalog needs at least one membership")
        if self.num_weights < 1:
            raise ValidationError("catalog needs at least one weight")
        k0 = next(
            (i + 1 for i, f in enumerate(memberships) if f.is_dont_change),
            None,
        )
        if k0 is None:
            raise ValidationError(
                "catalog must contain the Don't Change membership (0, 1, 1)"
            )
        object.__setattr__(self, "_dont_change_index", k0)

    @property
    def num_memberships(self) -> int:
        return len(self.memberships)

    @property
    def size(self) -> int:
        return self.num_memberships + self.num_weights

    @property
    def dont_change_index(self) -> int:
        return self._dont_change_index

    def index_kind(self, k: int) -> str:
        """"membership" for k <= D_F, "weight" above."""
        self._check_index(k)
        return "membership" if k <= self.num_memberships else "weight"

    def weight_factor(self, k: int) -> float:
        return (k - self.num_memberships) / self.num_weights

    def describe_index(self, k: int) -> dict:
        """Parameters of the function at index k, for reports."""
        self._check_index(k)
        if k <= self.num_memberships:
            f = self.memberships[k - 1]
            return {"kind": "membership", "a": f.a, "b": f.b, "c": f.c}
        return {"kind": "weight", "factor": self.weight_factor(k)}

    def _check_index(self, k: int) -> None:
        if not 1 <= k <= self.size:
            raise ValidationError(
                f"function index {k} outside 1..{self.size}"
            )

    def apply_index(self, k: int, p):
        """Apply the function at index k to ``p`` through the step gates.

        The membership gate step(D_F - k) and the weight gate
        step(k - D_F - 1) are mutually exclusive for valid k, so exactly one
        family is evaluated; the other contributes 0.
        """
        self._check_index(k)
        d_f = self.num_memberships
        membership_gate = heaviside(d_f - k)
        weight_gate = heaviside(k - d_f - 1)
        scalar = np.ndim(p) == 0
        value = 0.0 if scalar else np.zeros(np.shape(p), dtype=np.float64)
        if membership_gate:
            value = value + membership_gate * eval_membership(
                self.memberships[k - 1], p
            )
        if weight_gate:
            value = value + weight_gate * eval_weight(
                k, d_f, self.num_weights, p
            )
        return value


def validate_selection(fs: FunctionSet, xi, num_classes: int | None = None):
    """Check a per-class selection vector against the catalog; return a tuple.

    Every entry must be an integer index in 1..(D_F + D_W); when
    ``num_classes`` is given the length must equal it.
    """
    entries = tuple(int(k) for k in xi)
    if num_classes is not None and len(entries) != num_classes:
        raise ValidationError(
            f"selection has {len(entries)} entries, expected {num_classes}"
        )
    if not entries:
        raise ValidationError("selection vector is empty")
    for i, k in enumerate(entries):
        if not 1 <= k <= fs.size:
            raise ValidationError(
                f"selection entry {i + 1} is {k}, outside 1..{fs.size}"
            )
    return entries


def apply_selection(fs: FunctionSet, xi, row) -> np.ndarray:
    """Correct one probability row: class i goes through function xi[i]."""
    values = np.atleast_1d(np.asarray(row, dtype=np.float64))
    entries = validate_selection(fs, xi, num_classes=values.shape[0])
    return np.array(
        [fs.apply_index(entries[i], float(values[i])) for i in range(len(entries))],
        dtype=np.float64,
    )


def default_function_set() -> FunctionSet:
    """The stock catalog: 19 memberships plus 30 weight coefficients.

    Memberships are Don't Change, nine interior triangles with peaks at
    0.1..0.9 and feet 0.25 to either side (clipped to [0, 1]), five falling
    shoulders (0, 0, c), and four rising shoulders (a, 1, 1). Weights are
    1/30, 2/30, ..., 1.
    """
    memberships = [TriangularMembership(0.0, 1.0, 1.0)]
    for i in range(1, 10):
        memberships.append(
            TriangularMembership(
                max(0.0, (10 * i - 25) / 100),
                i / 10,
                min(1.0, (10 * i + 25) / 100),
            )
        )
    for c in (0.2, 0.4, 0.6, 0.8, 1.0):
        memberships.append(TriangularMembership(0.0, 0.0, c))
    for a in (0.2, 0.4, 0.6, 0.8):
        memberships.append(TriangularMembership(a, 1.0, 1.0))
    return FunctionSet(memberships=tuple(memberships), num_weights=30)


def save_catalog(fs: FunctionSet, path: str | Path) -> None:
    payload = {
        "memberships": [
            {"a": f.a, "b": f.b, "c": f.c} for f in fs.memberships
        ],
        "num_weights": fs.num_weights,
    }
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_catalog(path: str | Path) -> FunctionSet:
    with Path(path).open(encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON: {exc}") from None
    try:
        memberships = tuple(
            TriangularMembership(float(m["a"]), float(m["b"]), float(m["c"]))
            for m in payload["memberships"]
        )
        num_weights = int(payload["num_weights"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"{path}: malformed catalog: {exc}") from None
    return FunctionSet(memberships=memberships, num_weights=num_weights)
