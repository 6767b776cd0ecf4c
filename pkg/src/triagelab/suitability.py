"""Developer-suitability scoring from bug text.

A one-vs-rest linear max-margin classifier maps a TF-IDF vector to a
raw score per active developer.  Raw scores are min-max normalized per
bug, so each row has max 1 and only the within-bug ordering matters.
Training is full-batch subgradient descent on the hinge loss with a
fixed epoch budget, which makes identical inputs give identical
weights.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

DEFAULT_C = 1000.0
DEFAULT_EPOCHS = 200


@dataclass
class LinearModel:
    dev_ids: list  # sorted; row order of weights
    weights: np.ndarray  # (n_devs, n_features) finite
    bias: np.ndarray  # (n_devs,)
    n_features: int
    C: float = DEFAULT_C
    epochs: int = DEFAULT_EPOCHS
    seed: int = 0

    def decision_values(self, dense_vec: np.ndarray) -> np.ndarray:
        return self.weights @ dense_vec + self.bias

    def to_json(self) -> str:
        per_dev = []
        for row, dev in enumerate(self.dev_ids):
            nz = np.nonzero(self.weights[row])[0]
            per_dev.append(
                {
                    "dev_id": dev,
                    "bias": float(self.bias[row]),
                    "weights": [[int(i), float(self.weights[row, i])] for i in nz],
                }
            )
        return json.dumps(
            {
                "n_features": self.n_features,
                "C": self.C,
                "epochs": self.epochs,
                "seed": self.seed,
                "developers": per_dev,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "LinearModel":
        obj = json.loads(text)
        dev_ids = [d["dev_id"] for d in obj["developers"]]
        n_features = obj["n_features"]
        weights = np.zeros((len(dev_ids), n_features))
        bias = np.zeros(len(dev_ids))
        for row, d in enumerate(obj["developers"]):
            bias[row] = d["bias"]
            for idx, w in d["weights"]:
                weights[row, idx] = w
        return cls(
            dev_ids=dev_ids,
            weights=weights,
            bias=bias,
            n_features=n_features,
            C=obj["C"],
            epochs=obj["epochs"],
            seed=obj["seed"],
        )


@dataclass(frozen=True)
class SuitabilityRow:
    bug_id: int
    s: dict  # dev_id -> value in [0, 1]; max over devs is 1

    def argmax_dev(self) -> int:
        """Best developer; ties broken toward the smallest dev_id."""
        best = max(self.s.values())
        return min(d for d, v in self.s.items() if v == best)


def train_classifier(
    train_pairs,
    n_features: int,
    C: float = DEFAULT_C,
    epochs: int = DEFAULT_EPOCHS,
    seed: int = 0,
) -> LinearModel:
    """Fit one-vs-rest hinge-loss linear separators.

    ``train_pairs`` is a list of (TfidfVector, dev_id).  Requires at
    least two distinct labels.  Deterministic: fixed epoch count,
    full-batch updates, no shuffling.
    """
    labels = sorted({dev for _, dev in train_pairs})
    if len(labels) < 2:
        raise ValidationError("need at least two developer labels to train")
    n = len(train_pairs)
    X = np.zeros((n, n_features + 1))  # last column: constant bias feature
    X[:, n_features] = 1.0
    for i, (vec, _) in enumerate(train_pairs):
        for idx, w in vec.entries:
            X[i, idx] = w
    lam = 1.0 / (C * n)
    weights = np.zeros((len(labels), n_features))
    bias = np.zeros(len(labels))
    for row, dev in enumerate(labels):
        y = np.where(np.array([d for _, d in train_pairs]) == dev, 1.0, -1.0)
        w = np.zeros(n_features + 1)
        for t in range(1, epochs + 1):
            margins = y * (X @ w)
            violating = margins < 1.0
            grad = lam * np.concatenate([w[:-1], [0.0]])  # bias unregularized
            grad -= (y[violating] @ X[violating]) / n
            w -= grad / (lam * t)
        if not np.all(np.isfinite(w)):
            raise ValidationError("training diverged to non-finite weights")
        weights[row] = w[:-1]
        bias[row] = w[-1]
    return LinearModel(
        dev_ids=labels,
        weights=weights,
        bias=bias,
        n_features=n_features,
        C=C,
        epochs=epochs,
        seed=seed,
    )


def predict_suitability(model: LinearModel, doc_vector, developers, bug_id: int = -1) -> SuitabilityRow:
    """Min-max normalized decision values over ``developers``.

    All-equal decision values normalize to all 1.0 (no information:
    every developer equally suitable).
    """
    developers = sorted(developers)
    if not developers:
        raise ValidationError("empty developer set")
    dense = doc_vector.to_dense(model.n_features)
    decisions = model.decision_values(dense)
    row_index = {dev: i for i, dev in enumerate(model.dev_ids)}
    try:
        values = np.array([decisions[row_index[d]] for d in developers])
    except KeyError as exc:
        raise ValidationError(f"developer {exc.args[0]} not in model") from exc
    lo, hi = values.min(), values.max()
    if hi - lo == 0.0:
        s = {d: 1.0 for d in developers}
    else:
        s = {
            d: float((v - lo) / (hi - lo)) for d, v in zip(developers, values)
        }
    return SuitabilityRow(bug_id=bug_id, s=s)
