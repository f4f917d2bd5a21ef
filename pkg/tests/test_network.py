import json

import numpy as np
import pytest

from conftest import random_input_for, random_model
from convstream import (
    IncompleteSequenceError,
    SequenceOverrunError,
    ShapeError,
    StreamingNetwork,
    batch_features,
    batch_infer,
    load_model,
    reference_model,
    stream_infer,
)


def tiny_model(layers, length, channels=1):
    doc = {
        "format_version": 1,
        "input": {"length": length, "channels": channels},
        "layers": layers,
    }
    return load_model(json.dumps(doc))


def staircase_model():
    """conv kernel 2 summing the window, identity head: traceable by hand."""
    return tiny_model([
        {"kind": "conv1d", "filters": 1, "kernel": 2, "stride": 1,
         "activation": "identity",
         "weights": [[[1.0, 1.0]]], "bias": [0.0]},
        {"kind": "flatten", "size": 4},
        {"kind": "softmax", "classes": 2,
         "weights": [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]],
         "bias": [0.0, 0.0]},
    ], length=5)


def test_staircase_by_hand():
    m = staircase_model()
    net = StreamingNetwork.from_model(m)
    reports = [net.step([float(v)]) for v in range(5)]  # 0,1,2,3,4
    # pairwise sums land in the collector: 1, 3, 5, 7
    assert net.collector.tolist() == [1.0, 3.0, 5.0, 7.0]
    assert [r.stages_fired for r in reports] == [0, 1, 1, 1, 1]
    assert [r.macs for r in reports] == [0, 2, 2, 2, 2]
    probs = net.finalize()
    # logits are (1, 7): softmax = e^1/(e^1+e^7), e^7/(e^1+e^7)
    want = np.exp([1.0, 7.0])
    want /= want.sum()
    np.testing.assert_allclose(probs, want, rtol=1e-12)


def test_zero_softmax_weights_give_uniform_probs():
    m = tiny_model([
        {"kind": "conv1d", "filters": 1, "kernel": 2, "stride": 1,
         "activation": "relu", "weights": [[[0.5, 0.5]]], "bias": [0.1]},
        {"kind": "flatten", "size": 2},
        {"kind": "softmax", "classes": 2,
         "weights": [[0.0, 0.0], [0.0, 0.0]], "bias": [0.0, 0.0]},
    ], length=3)
    probs, _ = stream_infer(m, np.ones((3, 1), dtype=np.float32))
    np.testing.assert_allclose(probs, [0.5, 0.5], rtol=0, atol=0)
    assert probs.sum() == pytest.approx(1.0)


def test_overrun_and_incomplete_are_rejected():
    m = staircase_model()
    net = StreamingNetwork(m)
    with pytest.raises(IncompleteSequenceError):
        net.finalize()
    for v in range(5):
        net.step([float(v)])
    with pytest.raises(SequenceOverrunError):
        net.step([9.0])
    net.finalize()  # still fine after the failed push


def test_reset_makes_runs_reproducible():
    m = reference_model(seed=3)
    rng = np.random.default_rng(30)
    x = random_input_for(m, rng)
    net = StreamingNetwork(m)
    results = []
    for _ in range(3):
        for row in x:
            net.step(row)
        results.append(net.finalize())
        net.reset()
    assert np.array_equal(results[0], results[1])
    assert np.array_equal(results[1], results[2])


def test_batch_input_shape_checked():
    m = staircase_model()
    with pytest.raises(ShapeError):
        batch_infer(m, np.zeros((4, 1), dtype=np.float32))  # one sample short
    with pytest.raises(ShapeError):
        batch_infer(m, np.zeros((5, 2), dtype=np.float32))  # wrong channels
    with pytest.raises(ShapeError):
        batch_infer(m, np.zeros(5, dtype=np.float32))


def test_streaming_matches_batch_on_reference_model():
    m = reference_model(seed=0)
    rng = np.random.default_rng(100)
    x = random_input_for(m, rng)
    stream_probs, reports = stream_infer(m, x)
    batch_probs = batch_infer(m, x)
    assert np.abs(stream_probs - batch_probs).max() <= 1e-5
    net = StreamingNetwork(m)
    for row in x:
        net.step(row)
    assert np.abs(net.collector - batch_features(m, x)).max() <= 1e-6
    # feature vector is time-major: 2 final-stage fires x 8 filters
    assert m.feature_dim == 16
    assert sum(1 for r in reports if r.stages_fired == len(m.stages)) == 2


def test_streaming_matches_batch_campaign():
    rng = np.random.default_rng(2024)
    for _ in range(40):
        m = random_model(rng)
        x = random_input_for(m, rng)
        stream_probs, reports = stream_infer(m, x)
        batch_probs = batch_infer(m, x)
        assert np.abs(stream_probs - batch_probs).max() <= 1e-5
        assert stream_probs.sum() == pytest.approx(1.0, abs=1e-9)
        # per-step cost classes are bounded by the stage count plus idle
        classes = {r.macs for r in reports}
        assert len(classes) <= len(m.stages) + 1


def test_step_accepts_lists_tuples_and_arrays():
    m = staircase_model()
    net = StreamingNetwork(m)
    net.step([0.0])
    net.step((1.0,))
    net.step(np.array([2.0], dtype=np.float32))
    net.step(np.array([3.0]))
    net.step([4.0])
    np.testing.assert_allclose(net.finalize().sum(), 1.0)
