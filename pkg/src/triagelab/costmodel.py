"""Fixing-cost estimation: LDA topics + per-topic developer averages.

Bugs are grouped into topics with collapsed-Gibbs LDA (topic count
picked by the singular-value / document-mixture divergence criterion).
Each developer's cost for a topic is the arithmetic mean of their
training fixing times on that topic; missing cells are filled by a
user-based cosine collaborative filter with deterministic fallbacks
(topic column mean, then global mean).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .textprep import preprocess_text

GLOBAL_TOPIC = -1  # sentinel for docs with no in-vocabulary tokens

DEFAULT_GIBBS_ITERS = 1000
DEFAULT_INFER_SWEEPS = 50
BETA_LDA = 0.01

OBSERVED = "OBSERVED"
CF = "CF"
GLOBAL_MEAN = "GLOBAL_MEAN"


@dataclass
class TopicModel:
    K: int
    phi: np.ndarray  # (K, V); rows sum to 1
    alpha_lda: float
    beta_lda: float
    seed: int
    iters: int
    vocab_size: int
    doc_topic: np.ndarray | None = None  # (D, K) training mixture, for selection

    def to_json(self) -> str:
        return json.dumps(
            {
                "K": self.K,
                "alpha_lda": self.alpha_lda,
                "beta_lda": self.beta_lda,
                "seed": self.seed,
                "iters": self.iters,
                "vocab_size": self.vocab_size,
                "phi": self.phi.tolist(),
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "TopicModel":
        obj = json.loads(text)
        return cls(
            K=obj["K"],
            phi=np.array(obj["phi"]),
            alpha_lda=obj["alpha_lda"],
            beta_lda=obj["beta_lda"],
            seed=obj["seed"],
            iters=obj["iters"],
            vocab_size=obj["vocab_size"],
        )


def _doc_word_ids(doc, vocab):
    return [vocab.index[t] for t in doc.tokens if t in vocab.index]


def fit_lda(docs, vocab, K: int, seed: int = 0, iters: int = DEFAULT_GIBBS_ITERS) -> TopicModel:
    """Collapsed Gibbs sampling; alpha = 50/K, beta = 0.01.

    Deterministic given the seed.  Docs with no in-vocabulary tokens
    contribute nothing but keep their row in the mixture.
    """
    if K < 2:
        raise ValidationError("topic count must be at least 2")
    word_ids = [_doc_word_ids(d, vocab) for d in docs]
    if sum(len(ids) for ids in word_ids) == 0:
        raise ValidationError("corpus has no in-vocabulary tokens")
    V = len(vocab)
    alpha = 50.0 / K
    beta = BETA_LDA
    rng = np.random.default_rng(seed)

    n_dk = np.zeros((len(docs), K))
    n_kw = np.zeros((K, V))
    n_k = np.zeros(K)
    assignments = []
    for d, ids in enumerate(word_ids):
        z = rng.integers(0, K, size=len(ids))
        assignments.append(z)
        for w, k in zip(ids, z):
            n_dk[d, k] += 1
            n_kw[k, w] += 1
            n_k[k] += 1

    for _ in range(iters):
        for d, ids in enumerate(word_ids):
            z = assignments[d]
            row = n_dk[d]
            for j, w in enumerate(ids):
                k = z[j]
                row[k] -= 1
                n_kw[k, w] -= 1
                n_k[k] -= 1
                p = (row + alpha) * (n_kw[:, w] + beta) / (n_k + V * beta)
                p /= p.sum()
                k = int(rng.choice(K, p=p))
                z[j] = k
                row[k] += 1
                n_kw[k, w] += 1
                n_k[k] += 1

    phi = (n_kw + beta) / (n_k + V * beta)[:, None]
    theta = (n_dk + alpha) / (n_dk.sum(axis=1) + K * alpha)[:, None]
    return TopicModel(
        K=K,
        phi=phi,
        alpha_lda=alpha,
        beta_lda=beta,
        seed=seed,
        iters=iters,
        vocab_size=V,
        doc_topic=theta,
    )


def _symmetric_kl(p, q):
    eps = 1e-12
    p = np.maximum(p, eps)
    q = np.maximum(q, eps)
    return float(np.sum(p * np.log(p / q)) + np.sum(q * np.log(q / p)))


def arun_measure(model: TopicModel, doc_lengths) -> float:
    """Divergence between topic-word singular values and the
    length-weighted document-topic mixture (both sorted descending)."""
    sv = np.linalg.svd(model.phi, compute_uv=False)
    cm1 = np.sort(sv / sv.sum())[::-1]
    lengths = np.asarray(doc_lengths, dtype=float)
    mix = lengths @ model.doc_topic
    cm2 = np.sort(mix / mix.sum())[::-1]
    return _symmetric_kl(cm1, cm2)


def select_topic_count(docs, vocab, candidate_Ks, seed: int = 0, iters: int = DEFAULT_GIBBS_ITERS):
    """Fit each candidate K and return the one minimizing the
    divergence measure; ties break toward the smaller K."""
    candidates = sorted(set(candidate_Ks))
    if not candidates:
        raise ValidationError("empty candidate grid")
    lengths = [len(_doc_word_ids(d, vocab)) for d in docs]
    best_k = None
    best_measure = None
    for K in candidates:
        model = fit_lda(docs, vocab, K, seed=seed, iters=iters)
        measure = arun_measure(model, lengths)
        if best_measure is None or measure < best_measure:
            best_k, best_measure = K, measure
    return best_k


def infer_topic(model: TopicModel, doc, vocab, sweeps: int = DEFAULT_INFER_SWEEPS) -> int:
    """Fold-in Gibbs for a single doc; returns the dominant topic.

    Deterministic: a fresh generator is seeded from the model seed, so
    the same doc always lands on the same topic.  A doc with zero
    in-vocabulary tokens gets the GLOBAL_TOPIC sentinel.
    """
    ids = _doc_word_ids(doc, vocab)
    if not ids:
        return GLOBAL_TOPIC
    rng = np.random.default_rng(model.seed)
    K = model.K
    alpha = model.alpha_lda
    z = rng.integers(0, K, size=len(ids))
    counts = np.bincount(z, minlength=K).astype(float)
    for _ in range(sweeps):
        for j, w in enumerate(ids):
            counts[z[j]] -= 1
            p = (counts + alpha) * model.phi[:, w]
            p /= p.sum()
            k = int(rng.choice(K, p=p))
            z[j] = k
            counts[k] += 1
    return int(np.argmax(counts))  # argmax takes the smallest tied index


@dataclass
class CostMatrix:
    dev_ids: list  # sorted
    K: int
    observed: dict  # (dev_id, k) -> mean fixing days
    filled: np.ndarray | None = None  # (D, K), complete and positive
    provenance: dict = field(default_factory=dict)  # (dev_id, k) -> str

    @property
    def global_mean(self) -> float:
        if not self.observed:
            raise ValidationError("cost matrix has no observed cells")
        return float(np.mean(list(self.observed.values())))

    def cost(self, dev_id: int, topic: int) -> float:
        """Estimated fixing days; GLOBAL_TOPIC maps to the global mean."""
        if topic == GLOBAL_TOPIC:
            return self.global_mean
        if self.filled is None:
            raise ValidationError("cost matrix not filled yet")
        return float(self.filled[self.dev_ids.index(dev_id), topic])

    def cost_row(self, topic: int) -> dict:
        return {d: self.cost(d, topic) for d in self.dev_ids}

    def to_json(self) -> str:
        return json.dumps(
            {
                "dev_ids": self.dev_ids,
                "K": self.K,
                "observed": [
                    [d, k, v] for (d, k), v in sorted(self.observed.items())
                ],
                "filled": None if self.filled is None else self.filled.tolist(),
                "provenance": [
                    [d, k, p] for (d, k), p in sorted(self.provenance.items())
                ],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "CostMatrix":
        obj = json.loads(text)
        return cls(
            dev_ids=obj["dev_ids"],
            K=obj["K"],
            observed={(d, k): v for d, k, v in obj["observed"]},
            filled=None if obj["filled"] is None else np.array(obj["filled"]),
            provenance={(d, k): p for d, k, p in obj["provenance"]},
        )


def build_cost_matrix(train_records, model: TopicModel, vocab, dev_ids=None, topic_by_bug=None) -> CostMatrix:
    """Per-(developer, topic) mean fixing days over training records.

    Records must have an assignee and a fixing time.  Topic per bug is
    inferred from its text unless supplied in ``topic_by_bug``.
    Missing cells stay absent until ``fill_missing_cf``.
    """
    if dev_ids is None:
        dev_ids = sorted(
            {r.actual_assignee for r in train_records if r.actual_assignee is not None}
        )
    samples: dict[tuple, list] = {}
    for rec in train_records:
        if rec.actual_assignee is None or rec.fixing_time is None:
            continue
        if rec.actual_assignee not in dev_ids:
            continue
        if topic_by_bug is not None:
            topic = topic_by_bug[rec.bug_id]
        else:
            doc = preprocess_text(rec.summary, rec.description, rec.bug_id)
            topic = infer_topic(model, doc, vocab)
        if topic == GLOBAL_TOPIC:
            continue
        samples.setdefault((rec.actual_assignee, topic), []).append(rec.fixing_time)
    observed = {
        cell: float(np.mean(times)) for cell, times in sorted(samples.items())
    }
    provenance = {cell: OBSERVED for cell in observed}
    return CostMatrix(
        dev_ids=list(dev_ids), K=model.K, observed=observed, provenance=provenance
    )


def _dev_similarity(obs_a: dict, obs_b: dict) -> float | None:
    """Cosine over commonly observed topics; None without overlap."""
    shared = sorted(set(obs_a) & set(obs_b))
    if not shared:
        return None
    a = np.array([obs_a[k] for k in shared])
    b = np.array([obs_b[k] for k in shared])
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    if denom == 0:
        return None
    return float(a @ b / denom)


def fill_missing_cf(matrix: CostMatrix) -> CostMatrix:
    """Complete the matrix; observed cells are never altered.

    Missing (d, k): similarity-weighted average of other developers'
    observed topic-k costs; falls back to the topic column mean (tagged
    CF, the uniform-weight degenerate case), then to the global mean.
    """
    if not matrix.observed:
        raise ValidationError("cannot fill a matrix with no observed cells")
    dev_ids = matrix.dev_ids
    K = matrix.K
    by_dev: dict[int, dict] = {d: {} for d in dev_ids}
    for (d, k), v in matrix.observed.items():
        by_dev[d][k] = v
    global_mean = matrix.global_mean

    filled = np.zeros((len(dev_ids), K))
    provenance = dict(matrix.provenance)
    for i, d in enumerate(dev_ids):
        for k in range(K):
            if (d, k) in matrix.observed:
                filled[i, k] = matrix.observed[(d, k)]
                provenance.setdefault((d, k), OBSERVED)
                continue
            num = den = 0.0
            for other in dev_ids:
                if other == d or k not in by_dev[other]:
                    continue
                sim = _dev_similarity(by_dev[d], by_dev[other])
                if sim is None or sim <= 0:
                    continue
                num += sim * by_dev[other][k]
                den += sim
            if den > 0:
                filled[i, k] = num / den
                provenance[(d, k)] = CF
                continue
            column = [by_dev[o][k] for o in dev_ids if k in by_dev[o]]
            if column:
                filled[i, k] = float(np.mean(column))
                provenance[(d, k)] = CF
            else:
                filled[i, k] = global_mean
                provenance[(d, k)] = GLOBAL_MEAN
    if not np.all(filled > 0):
        raise ValidationError("filled cost matrix must be strictly positive")
    return CostMatrix(
        dev_ids=dev_ids,
        K=K,
        observed=dict(matrix.observed),
        filled=filled,
        provenance=provenance,
    )
