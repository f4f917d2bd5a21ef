import numpy as np
import pytest

from convstream import ConvStage, PoolStage, ShapeError, output_count


def identity_conv(kernel, stride=1, weight=1.0, bias=0.0):
    """Single-channel single-filter stage whose fire sums the window."""
    w = np.full((1, 1, kernel), weight, dtype=np.float32)
    b = np.array([bias], dtype=np.float32)
    return ConvStage(1, 1, kernel, stride, w, b, activation="identity")


# ---------------------------------------------------------------------------
# output_count


def test_output_count_reference_chain():
    assert output_count(460, 8, 1) == 453
    assert output_count(453, 3, 3) == 151
    assert output_count(151, 8, 1) == 144
    assert output_count(144, 3, 3) == 48


def test_output_count_edges():
    assert output_count(2, 3, 3) == 0  # window never fills
    assert output_count(3, 3, 3) == 1
    assert output_count(5, 2, 1) == 4
    assert output_count(10, 4, 2) == 4
    assert output_count(0, 1, 1) == 0


# ---------------------------------------------------------------------------
# convolution stages


def test_window_sums_by_hand():
    stage = identity_conv(kernel=2, stride=1)
    assert not stage.step([2.0]).fired
    out = stage.step([3.0])
    assert out.fired and out.output.tolist() == [5.0]
    out = stage.step([6.0])  # window slides to (3, 6)
    assert out.fired and out.output.tolist() == [9.0]


def test_stride_two_skips_every_other_window():
    stage = identity_conv(kernel=2, stride=2)
    values = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    fired = [stage.step([v]) for v in values]
    outputs = [o.output[0] for o in fired if o.fired]
    assert outputs == [3.0, 7.0, 11.0]  # disjoint pairs


def test_zero_kernel_passes_bias_through():
    stage = identity_conv(kernel=3, weight=0.0, bias=0.5)
    outs = [stage.step([v]) for v in (9.0, -4.0, 2.0, 7.0)]
    assert [o.output[0] for o in outs if o.fired] == [0.5, 0.5]


def test_relu_clamps_negative_fires():
    w = np.full((1, 1, 2), 1.0, dtype=np.float32)
    b = np.zeros(1, dtype=np.float32)
    stage = ConvStage(1, 1, 2, 1, w, b, activation="relu")
    stage.step([-3.0])
    assert stage.step([1.0]).output.tolist() == [0.0]


def test_fire_indices_follow_window_arithmetic():
    # stage with window M and stride s fires on samples i where i >= M and
    # (i - M) % s == 0 (1-based)
    rng = np.random.default_rng(11)
    for _ in range(30):
        kernel = int(rng.integers(2, 10))
        stride = int(rng.integers(1, kernel + 1))
        stage = identity_conv(kernel, stride)
        n = int(rng.integers(kernel, 60))
        fired_at = [
            i for i in range(1, n + 1)
            if stage.step([float(rng.standard_normal())]).fired
        ]
        expected = [i for i in range(kernel, n + 1) if (i - kernel) % stride == 0]
        assert fired_at == expected
        assert stage.fires == output_count(n, kernel, stride)


def test_conv_against_sliding_window_oracle():
    rng = np.random.default_rng(12)
    for _ in range(40):
        channels = int(rng.integers(1, 5))
        kernel = int(rng.integers(2, 9))
        stride = int(rng.integers(1, kernel + 1))
        filters = int(rng.integers(1, 6))
        w = rng.standard_normal((filters, channels, kernel)).astype(np.float32)
        b = rng.standard_normal(filters).astype(np.float32)
        stage = ConvStage(channels, filters, kernel, stride, w, b,
                          activation="identity")
        n = int(rng.integers(kernel, 40))
        x = rng.standard_normal((n, channels)).astype(np.float32)

        got = [s.output for s in (stage.step(row) for row in x) if s.fired]
        want = []
        for t in range(output_count(n, kernel, stride)):
            win = x[t * stride:t * stride + kernel].astype(np.float64)  # (k, c)
            acc = np.einsum("fcj,jc->f", w.astype(np.float64), win) + b
            want.append(acc.astype(np.float32))
        assert len(got) == len(want)
        for g, wv in zip(got, want):
            np.testing.assert_allclose(g, wv, rtol=1e-6, atol=1e-7)


def test_conv_mac_count():
    w = np.zeros((4, 3, 8), dtype=np.float32)
    b = np.zeros(4, dtype=np.float32)
    stage = ConvStage(3, 4, 8, 1, w, b)
    assert stage.fire_macs == 4 * 3 * 8
    for i in range(8):
        out = stage.step([0.0, 0.0, 0.0])
    assert out.mac_count == 96
    assert stage.step([0.0, 0.0, 0.0]).mac_count == 96  # fires every step now


def test_conv_validation():
    w = np.zeros((2, 1, 4), dtype=np.float32)
    b = np.zeros(2, dtype=np.float32)
    with pytest.raises(ValueError):
        ConvStage(1, 2, 4, 5, w, b)  # stride > kernel
    with pytest.raises(ValueError):
        ConvStage(1, 2, 4, 0, w, b)
    with pytest.raises(ValueError):
        ConvStage(1, 2, 4, 1, w, b, activation="tanh")
    with pytest.raises(ShapeError):
        ConvStage(1, 2, 5, 1, w, b)  # weights do not match declared kernel
    with pytest.raises(ShapeError):
        ConvStage(1, 2, 4, 1, w, np.zeros(3, dtype=np.float32))


def test_sample_width_checked():
    stage = identity_conv(2)
    with pytest.raises(ShapeError):
        stage.step([1.0, 2.0])


# ---------------------------------------------------------------------------
# pooling stages


def test_max_pool_by_hand():
    stage = PoolStage(1, window=3, kind="max")
    outs = [stage.step([v]) for v in (1.0, 5.0, 2.0, 7.0, 0.0, 3.0)]
    assert [o.output[0] for o in outs if o.fired] == [5.0, 7.0]


def test_avg_pool_by_hand():
    stage = PoolStage(2, window=2, kind="avg")
    stage.step([1.0, 10.0])
    out = stage.step([3.0, 20.0])
    assert out.output.tolist() == [2.0, 15.0]
    assert out.mac_count == 2 * 2


def test_pool_stride_defaults_to_window():
    stage = PoolStage(1, window=3)
    assert stage.stride == 3


def test_overlapping_pool():
    stage = PoolStage(1, window=3, stride=1, kind="max")
    outs = [stage.step([v]) for v in (1.0, 2.0, 3.0, 4.0)]
    assert [o.output[0] for o in outs if o.fired] == [3.0, 4.0]


def test_pool_kind_checked():
    with pytest.raises(ValueError):
        PoolStage(1, window=3, kind="median")


def test_pool_against_oracle():
    rng = np.random.default_rng(13)
    for kind in ("max", "avg"):
        for _ in range(20):
            channels = int(rng.integers(1, 6))
            window = int(rng.integers(2, 7))
            stride = int(rng.integers(1, window + 1))
            stage = PoolStage(channels, window, stride, kind)
            n = int(rng.integers(window, 40))
            x = rng.standard_normal((n, channels)).astype(np.float32)
            got = [s.output for s in (stage.step(row) for row in x) if s.fired]
            for t, g in enumerate(got):
                win = x[t * stride:t * stride + window]
                want = (win.max(axis=0) if kind == "max"
                        else win.astype(np.float64).mean(axis=0).astype(np.float32))
                np.testing.assert_array_equal(g, want)


# ---------------------------------------------------------------------------
# buffer plumbing shared by both kinds


def test_channel_buffers_stay_in_lockstep():
    rng = np.random.default_rng(14)
    stage = PoolStage(4, window=5, stride=2, kind="max")
    for i in range(37):
        stage.step(rng.standard_normal(4).astype(np.float32))
        counts = {buf.count for buf in stage.buffers}
        tails = {buf.tail for buf in stage.buffers}
        assert len(counts) == 1 and len(tails) == 1
        assert stage.occupancy == counts.pop()


def test_reset_restores_initial_state():
    stage = identity_conv(3)
    x = [1.0, 2.0, 3.0, 4.0]
    first = [s.output[0] for s in (stage.step([v]) for v in x) if s.fired]
    stage.reset()
    assert stage.fires == 0 and stage.occupancy == 0
    second = [s.output[0] for s in (stage.step([v]) for v in x) if s.fired]
    assert first == second
