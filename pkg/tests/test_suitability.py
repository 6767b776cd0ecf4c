import numpy as np
import pytest

from triagelab.errors import ValidationError
from triagelab.suitability import (
    LinearModel,
    SuitabilityRow,
    predict_suitability,
    train_classifier,
)
from triagelab.textprep import TokenizedDoc, build_vocabulary, tfidf_transform


def _separable_fixture():
    """Dev 1 fixes 'render' bugs, dev 2 fixes 'socket' bugs."""
    docs = [
        TokenizedDoc(1, ("render", "canvas", "pixel")),
        TokenizedDoc(2, ("render", "pixel", "glyph")),
        TokenizedDoc(3, ("canvas", "glyph", "render")),
        TokenizedDoc(4, ("socket", "timeout", "packet")),
        TokenizedDoc(5, ("socket", "packet", "proxy")),
        TokenizedDoc(6, ("timeout", "proxy", "socket")),
    ]
    vocab = build_vocabulary(docs, min_df=1)
    labels = [1, 1, 1, 2, 2, 2]
    pairs = [(tfidf_transform(d, vocab), y) for d, y in zip(docs, labels)]
    return docs, vocab, pairs


def test_separable_fixture_learned():
    docs, vocab, pairs = _separable_fixture()
    model = train_classifier(pairs, n_features=len(vocab))
    for doc, label in zip(docs, [1, 1, 1, 2, 2, 2]):
        row = predict_suitability(model, tfidf_transform(doc, vocab), [1, 2])
        assert row.argmax_dev() == label
        assert max(row.s.values()) == 1.0
        assert min(row.s.values()) >= 0.0


def test_training_deterministic():
    _, vocab, pairs = _separable_fixture()
    a = train_classifier(pairs, n_features=len(vocab))
    b = train_classifier(pairs, n_features=len(vocab))
    assert np.array_equal(a.weights, b.weights)
    assert np.array_equal(a.bias, b.bias)
    assert a.to_json() == b.to_json()


def test_model_json_roundtrip_preserves_decisions():
    docs, vocab, pairs = _separable_fixture()
    model = train_classifier(pairs, n_features=len(vocab), C=1000.0)
    again = LinearModel.from_json(model.to_json())
    assert again.C == 1000.0
    vec = tfidf_transform(docs[0], vocab).to_dense(len(vocab))
    assert np.allclose(model.decision_values(vec), again.decision_values(vec))


def test_requires_two_labels():
    _, vocab, pairs = _separable_fixture()
    only_one = [(v, 1) for v, _ in pairs]
    with pytest.raises(ValidationError):
        train_classifier(only_one, n_features=len(vocab))


def test_all_equal_scores_normalize_to_one():
    model = LinearModel(
        dev_ids=[1, 2, 3],
        weights=np.zeros((3, 4)),
        bias=np.zeros(3),
        n_features=4,
    )
    doc_vec = tfidf_transform(
        TokenizedDoc(1, ()), build_vocabulary([TokenizedDoc(1, ("a1", "b2"))], min_df=1)
    )
    row = predict_suitability(model, doc_vec, [1, 2, 3])
    assert row.s == {1: 1.0, 2: 1.0, 3: 1.0}


def test_empty_developer_set_rejected():
    model = LinearModel([1, 2], np.zeros((2, 3)), np.zeros(2), 3)
    vec = tfidf_transform(
        TokenizedDoc(1, ()), build_vocabulary([TokenizedDoc(1, ("a1", "b2"))], min_df=1)
    )
    with pytest.raises(ValidationError):
        predict_suitability(model, vec, [])
    with pytest.raises(ValidationError):
        predict_suitability(model, vec, [1, 99])


def test_argmax_tie_breaks_to_smallest_dev():
    row = SuitabilityRow(bug_id=1, s={5: 1.0, 3: 1.0, 9: 0.2})
    assert row.argmax_dev() == 3
