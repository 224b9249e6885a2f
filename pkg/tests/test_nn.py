import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnetdet.errors import ShapeError
from gnetdet.nn import ConvKernel, Padding, as_tensor, conv3x3, maxpool2x2, relu, softmax
from gnetdet.nn.reference import conv3x3_direct, maxpool2x2_direct


def random_kernel(rng, out_ch, in_ch, bias=True):
    w = rng.uniform(-1, 1, (out_ch, in_ch, 3, 3))
    b = rng.uniform(-1, 1, out_ch) if bias else np.zeros(out_ch)
    return ConvKernel(w, b)


def test_tensor_layout_is_channel_major():
    flat = np.arange(2 * 3 * 4)
    t = as_tensor(flat, (2, 3, 4))
    c, y, x = 1, 2, 3
    assert t[c, y, x] == flat[c * 12 + y * 4 + x]


def test_tensor_rejects_wrong_length():
    with pytest.raises(ShapeError):
        as_tensor(np.zeros(10), (2, 2, 2))


def test_kernel_must_be_3x3():
    with pytest.raises(ShapeError):
        ConvKernel(np.zeros((1, 1, 5, 5)), np.zeros(1))


def test_conv_zero_input_same():
    k = ConvKernel(np.ones((1, 1, 3, 3)), np.zeros(1))
    out = conv3x3(np.zeros((1, 7, 7)), k, Padding.SAME)
    assert out.shape == (1, 7, 7)
    assert not out.any()


def test_valid_conv_chain_reaches_1x1(rng):
    x = rng.standard_normal((4, 7, 7))
    sizes = []
    for _ in range(3):
        x = conv3x3(x, random_kernel(rng, 4, 4), Padding.VALID)
        sizes.append(x.shape[1:])
    assert sizes == [(5, 5), (3, 3), (1, 1)]


def test_conv_same_matches_direct_loops(rng):
    x = rng.standard_normal((2, 5, 5)).astype(np.float32)
    k = random_kernel(rng, 3, 2)
    got = conv3x3(x, k, Padding.SAME)
    want = conv3x3_direct(x, k.weight, k.bias, 1)
    np.testing.assert_allclose(got, want, atol=1e-5, rtol=0)


@pytest.mark.parametrize("padding", [Padding.SAME, Padding.VALID])
def test_backends_agree_with_direct_loops(impl, rng, padding):
    for _ in range(20):
        c, o = rng.integers(1, 9, size=2)
        h, w = rng.integers(3, 17, size=2)
        x = rng.uniform(-1, 1, (c, h, w)).astype(np.float32)
        k = random_kernel(rng, o, c)
        got = impl.conv3x3(x, k.weight, k.bias, padding.width)
        np.testing.assert_allclose(got, conv3x3_direct(x, k.weight, k.bias, padding.width), atol=1e-5, rtol=0)


def test_conv_errors():
    k = ConvKernel.zeros(1, 2)
    with pytest.raises(ShapeError):
        conv3x3(np.zeros((3, 5, 5)), k)
    with pytest.raises(ShapeError):
        conv3x3(np.zeros((2, 2, 5)), k, Padding.VALID)


def test_conv_does_not_mutate_input(rng):
    x = rng.standard_normal((2, 6, 6)).astype(np.float32)
    before = x.copy()
    conv3x3(x, random_kernel(rng, 2, 2))
    np.testing.assert_array_equal(x, before)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(1, 6), st.integers(1, 16), st.integers(1, 16),
       st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2**32 - 1))
def test_conv_is_linear_without_bias(c, o, h, w, a, b, seed):
    rng = np.random.default_rng(seed)
    k = random_kernel(rng, o, c, bias=False)
    x = rng.uniform(-1, 1, (c, h, w)).astype(np.float32)
    y = rng.uniform(-1, 1, (c, h, w)).astype(np.float32)
    lhs = conv3x3(a * x + b * y, k)
    rhs = a * conv3x3(x, k) + b * conv3x3(y, k)
    np.testing.assert_allclose(lhs, rhs, atol=1e-4, rtol=0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6).flatmap(lambda k: st.tuples(st.just(k), st.integers(2 * k + 1, 2 * k + 12))))
def test_valid_recurrence(kn):
    k, n = kn
    x = np.ones((1, n, n), np.float32)
    kern = ConvKernel.zeros(1, 1)
    for _ in range(k):
        x = conv3x3(x, kern, Padding.VALID)
    assert x.shape == (1, n - 2 * k, n - 2 * k)


def test_relu_sign_cases():
    np.testing.assert_array_equal(relu(as_tensor([-1.0, 0.0, 2.0], (1, 1, 3))).ravel(), [0, 0, 2])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_relu_properties(seed):
    t = np.random.default_rng(seed).standard_normal((3, 5, 4)).astype(np.float32)
    r = relu(t)
    np.testing.assert_array_equal(relu(r), r)
    assert all(v >= 0 for v in r.ravel())
    pos = t > 0
    assert np.all(r[pos] <= t[pos])


def test_maxpool_single_block():
    out = maxpool2x2(as_tensor([1, 2, 3, 4], (1, 2, 2)))
    assert out.shape == (1, 1, 1) and out[0, 0, 0] == 4


def test_maxpool_downsampling_shape():
    assert maxpool2x2(np.zeros((64, 224, 224), np.float32)).shape == (64, 112, 112)


def test_maxpool_matches_loops(impl, rng):
    x = rng.standard_normal((3, 8, 8)).astype(np.float32)
    np.testing.assert_array_equal(impl.maxpool2x2(x), maxpool2x2_direct(x))


def test_maxpool_rejects_odd():
    with pytest.raises(ShapeError):
        maxpool2x2(np.zeros((1, 3, 4)))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_maxpool_block_property(c, hh, ww, seed):
    x = np.random.default_rng(seed).standard_normal((c, 2 * hh, 2 * ww)).astype(np.float32)
    out = maxpool2x2(x)
    blocks = x.reshape(c, hh, 2, ww, 2).transpose(0, 1, 3, 2, 4).reshape(c, hh, ww, 4)
    assert np.all(out[..., None] >= blocks)
    assert np.all(np.any(out[..., None] == blocks, axis=-1))


def test_softmax_symmetric():
    np.testing.assert_array_equal(softmax([0, 0]), [0.5, 0.5])


def test_softmax_matches_extended_precision():
    mpmath.mp.dps = 50
    exps = [mpmath.exp(v) for v in (1, 2, 3)]
    want = [float(e / sum(exps)) for e in exps]
    np.testing.assert_allclose(softmax([1, 2, 3]), want, rtol=0, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-500, 500), min_size=1, max_size=64))
def test_softmax_normalized(v):
    p = softmax(v)
    assert abs(p.sum() - 1.0) <= 1e-9
    assert np.all(p >= 0)


def test_softmax_large_logits_do_not_overflow():
    p = softmax([1000.0, 1000.0])
    np.testing.assert_allclose(p, [0.5, 0.5])


def test_softmax_empty():
    with pytest.raises(ValueError):
        softmax([])
