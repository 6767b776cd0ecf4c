"""End-to-end wiring: clean -> train artifacts -> replay -> report.

Every stage reads and writes plain JSON artifacts so stages can be
run, inspected, and re-run independently (and compared across
implementations).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .corpus import (
    CleaningRule,
    DeveloperProfile,
    clean_bugs,
    select_active_developers,
    split_train_test,
)
from .costmodel import (
    TopicModel,
    CostMatrix,
    build_cost_matrix,
    fill_missing_cf,
    fit_lda,
    infer_topic,
    select_topic_count,
)
from .errors import ValidationError
from .simulator import ReplayCorpus, SimConfig, SimResult, TrainedModels, run_simulation
from .suitability import LinearModel, train_classifier
from .textprep import Vocabulary, build_vocabulary, preprocess_text, tfidf_transform

DEFAULT_TOPIC_GRID = tuple(range(5, 55, 5))


@dataclass
class TrainSettings:
    topic_grid: tuple = DEFAULT_TOPIC_GRID
    C: float = 1000.0
    seed: int = 0
    epochs: int = 200
    lda_iters: int = 1000
    min_df: int = 2


def prepare(records, boundary_day):
    """Clean the corpus and profile the active developers.

    Returns (cleaned, summary, profiles) where profiles covers the
    active developers with their training-phase component experience.
    """
    cleaned, summary = clean_bugs(records, CleaningRule(boundary_day=boundary_day))
    train, _ = split_train_test(cleaned, boundary_day)
    profiles = {
        p.dev_id: p for p in select_active_developers(train) if p.is_active
    }
    return cleaned, summary, profiles


def train_models(cleaned_train, profiles, settings: TrainSettings) -> TrainedModels:
    """Fit vocabulary, suitability classifier, topic model, and cost
    matrix on the cleaned training records."""
    if not profiles:
        raise ValidationError("no active developers to train on")
    train = [r for r in cleaned_train if r.actual_assignee in profiles]
    docs = [preprocess_text(r.summary, r.description, r.bug_id) for r in train]
    vocab = build_vocabulary(docs, min_df=settings.min_df)
    pairs = [
        (tfidf_transform(doc, vocab), rec.actual_assignee)
        for doc, rec in zip(docs, train)
    ]
    linear = train_classifier(
        pairs,
        n_features=len(vocab),
        C=settings.C,
        epochs=settings.epochs,
        seed=settings.seed,
    )
    K = select_topic_count(
        docs, vocab, settings.topic_grid, seed=settings.seed, iters=settings.lda_iters
    )
    topic_model = fit_lda(docs, vocab, K, seed=settings.seed, iters=settings.lda_iters)
    topic_by_bug = {
        doc.bug_id: infer_topic(topic_model, doc, vocab) for doc in docs
    }
    cost = build_cost_matrix(
        train, topic_model, vocab, dev_ids=sorted(profiles), topic_by_bug=topic_by_bug
    )
    cost = fill_missing_cf(cost)
    return TrainedModels(
        linear_model=linear,
        vocab=vocab,
        topic_model=topic_model,
        cost_matrix=cost,
        dev_profiles=dict(profiles),
    )


def replay_corpus(all_records, cleaned, boundary_day) -> ReplayCorpus:
    assignable = {
        r.bug_id for r in cleaned if r.reported_at > boundary_day
    }
    return ReplayCorpus(records=all_records, assignable_ids=assignable)


def run_policy(config: SimConfig, all_records, cleaned, models) -> SimResult:
    corpus = replay_corpus(all_records, cleaned, config.boundary_day)
    return run_simulation(config, corpus, models)


# --- artifact persistence ----------------------------------------------

def profiles_to_json(profiles) -> str:
    return json.dumps(
        [
            {
                "dev_id": p.dev_id,
                "name": p.name,
                "fixed_bug_count": p.fixed_bug_count,
                "components_experienced": sorted(p.components_experienced),
                "is_active": p.is_active,
            }
            for p in sorted(profiles.values(), key=lambda p: p.dev_id)
        ],
        indent=2,
    )


def profiles_from_json(text) -> dict:
    return {
        obj["dev_id"]: DeveloperProfile(
            dev_id=obj["dev_id"],
            name=obj["name"],
            fixed_bug_count=obj["fixed_bug_count"],
            components_experienced=frozenset(obj["components_experienced"]),
            is_active=obj["is_active"],
        )
        for obj in json.loads(text)
    }


def save_models(models: TrainedModels, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    artifacts = {
        "vocabulary.json": models.vocab.to_json(),
        "classifier.json": models.linear_model.to_json(),
        "topic_model.json": models.topic_model.to_json(),
        "cost_matrix.json": models.cost_matrix.to_json(),
        "dev_profiles.json": profiles_to_json(models.dev_profiles),
    }
    for name, text in artifacts.items():
        with open(os.path.join(out_dir, name), "w") as fh:
            fh.write(text)


def load_models(out_dir) -> TrainedModels:
    def read(name):
        path = os.path.join(out_dir, name)
        if not os.path.exists(path):
            raise ValidationError(f"missing artifact {name}; run `train` first")
        with open(path) as fh:
            return fh.read()

    return TrainedModels(
        linear_model=LinearModel.from_json(read("classifier.json")),
        vocab=Vocabulary.from_json(read("vocabulary.json")),
        topic_model=TopicModel.from_json(read("topic_model.json")),
        cost_matrix=CostMatrix.from_json(read("cost_matrix.json")),
        dev_profiles=profiles_from_json(read("dev_profiles.json")),
    )


def result_to_json(result: SimResult) -> str:
    return json.dumps(
        {
            "config": {
                "policy": result.config.policy,
                "boundary_day": result.config.boundary_day,
                "end_day": result.config.end_day,
                "alpha": result.config.alpha,
                "seed": result.config.seed,
                "horizon_L": result.config.horizon_L,
            },
            "log": result.log,
            "daily": result.daily,
            "total_entering": result.total_entering,
        },
        indent=2,
        sort_keys=True,
    )


def result_from_json(text) -> SimResult:
    obj = json.loads(text)
    return SimResult(
        config=SimConfig(**obj["config"]),
        log=obj["log"],
        daily=obj["daily"],
        total_entering=obj["total_entering"],
    )
