import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kan_module.bspline import bspline_basis, bspline_basis_derivative, make_grid
from kan_module.checkpoint import load_into, load_named_tensors, save_named_tensors
from kan_module.layers import (
    BsplineKanLayer,
    FourierKanLayer,
    KanConfig,
    LaplaceKanLayer,
    WaveletKanLayer,
    build_kan_layer,
    kan_forward,
    kan_init,
)
from tensorcore_module import ops
from tensorcore_module.gradcheck import gradcheck
from tensorcore_module.tensor import ShapeError, Tensor


KINDS = ["bspline", "fourier", "laplace", "wavelet"]
SMALL = KanConfig(grid_size=3, spline_order=2)


def test_grid_extends_by_order():
    grid = make_grid(5, 3, (-1.0, 1.0))
    assert grid.size == 5 + 2 * 3 + 1
    assert grid[3] == pytest.approx(-1.0)
    assert grid[-4] == pytest.approx(1.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.999, 0.999), st.integers(1, 6), st.integers(0, 3))
def test_bspline_partition_of_unity_inside_range(x, grid_size, order):
    grid = make_grid(grid_size, order, (-1.0, 1.0))
    bases = bspline_basis(np.array([x]), grid, order)
    assert bases.shape == (1, grid_size + order)
    assert np.all(bases >= -1e-12)
    assert bases.sum() == pytest.approx(1.0, abs=1e-10)


def test_bspline_zero_outside_extended_grid():
    grid = make_grid(5, 3, (-1.0, 1.0))
    assert np.all(bspline_basis(np.array([-5.0, 5.0]), grid, 3) == 0.0)


def test_bspline_derivative_matches_finite_difference():
    grid = make_grid(4, 3, (-1.0, 1.0))
    x = np.array([-0.63, 0.11, 0.77])
    eps = 1e-6
    numeric = (bspline_basis(x + eps, grid, 3) - bspline_basis(x - eps, grid, 3)) / (2 * eps)
    assert np.allclose(bspline_basis_derivative(x, grid, 3), numeric, atol=1e-6)


def test_bspline_rejects_bad_grid():
    with pytest.raises(ValueError):
        bspline_basis(np.zeros(2), np.array([0.0, 0.0, 1.0]), 1)


@pytest.mark.parametrize("kind", KINDS)
def test_layer_output_shape_and_parameters(kind):
    layer = kan_init(SMALL, 4, 3, seed=0, kind=kind)
    out = kan_forward(layer, Tensor(np.random.default_rng(1).uniform(-1, 1, size=(5, 4))))
    assert out.shape == (5, 3)
    assert layer.num_parameters == sum(p.data.size for p in layer.parameters().values())


@pytest.mark.parametrize("kind", KINDS)
def test_layer_rejects_wrong_width(kind):
    layer = kan_init(SMALL, 4, 3, seed=0, kind=kind)
    with pytest.raises(ShapeError):
        layer(Tensor(np.zeros((2, 5))))


@pytest.mark.parametrize("kind", KINDS)
def test_layer_gradients(kind):
    rng = np.random.default_rng(3)
    layer = build_kan_layer(kind, SMALL, 3, 2, rng)
    x = Tensor(rng.uniform(-0.9, 0.9, size=(4, 3)), requires_grad=True)
    target = Tensor(rng.normal(size=(4, 2)))
    params = {"x": x, **layer.parameters()}
    errors = gradcheck(lambda: ops.reduce_sum(ops.mul(layer(x), target)), params)
    assert max(errors.values()) < 1e-6


def test_bspline_layer_is_linear_in_silu_when_scalers_vanish():
    rng = np.random.default_rng(4)
    layer = BsplineKanLayer(3, 2, KanConfig(), rng)
    layer.spline_scaler.data[...] = 0.0
    x = rng.uniform(-1, 1, size=(6, 3))
    silu = x / (1.0 + np.exp(-x))
    assert np.allclose(layer(Tensor(x)).data, silu @ layer.base_weight.data.T, atol=1e-12)


def test_bspline_init_scales():
    layer = BsplineKanLayer(4, 3, KanConfig(scale_spline=0.7), np.random.default_rng(0))
    bound = np.sqrt(6.0 / 7.0)
    assert np.all(np.abs(layer.base_weight.data) <= bound)
    assert np.allclose(layer.spline_scaler.data, 0.7)
    assert layer.spline_coefficients.shape == (3, 4, 5 + 3)


def test_shape_parameters_start_positive_at_one():
    laplace = LaplaceKanLayer(2, 2, SMALL, np.random.default_rng(0))
    wavelet = WaveletKanLayer(2, 2, SMALL, np.random.default_rng(0))
    assert np.allclose(laplace.inverse_scale, 1.0)
    assert np.allclose(wavelet.scale, 1.0)


def test_kan_init_is_deterministic_per_seed():
    a = kan_init(SMALL, 3, 2, seed=9, kind="fourier")
    b = kan_init(SMALL, 3, 2, seed=9, kind="fourier")
    for name, tensor in a.parameters().items():
        assert np.array_equal(tensor.data, b.parameters()[name].data)


def test_kan_init_rejects_unknown_kind():
    with pytest.raises(ValueError):
        kan_init(SMALL, 2, 2, kind="chebyshev")


def test_config_rejects_unknown_keys_and_bad_range():
    with pytest.raises(ValueError):
        KanConfig(grid_sise=4)
    with pytest.raises(ValueError):
        KanConfig(grid_range=(1.0, -1.0))


def test_checkpoint_round_trip(tmp_path):
    layer = kan_init(SMALL, 3, 2, seed=0, kind="wavelet")
    path = save_named_tensors(tmp_path / "layer.npz", layer.parameters())
    loaded = load_named_tensors(path)
    assert set(loaded) == set(layer.parameters())

    fresh = kan_init(SMALL, 3, 2, seed=1, kind="wavelet")
    load_into(fresh.parameters(), path)
    for name, tensor in fresh.parameters().items():
        assert np.array_equal(tensor.data, layer.parameters()[name].data)


def test_checkpoint_shape_mismatch(tmp_path):
    path = save_named_tensors(tmp_path / "layer.npz", kan_init(SMALL, 3, 2, seed=0).parameters())
    with pytest.raises(ShapeError):
        load_into(kan_init(SMALL, 4, 2, seed=0).parameters(), path)


def _cox_de_boor(x: float, grid: np.ndarray, i: int, k: int) -> float:
    if k == 0:
        return 1.0 if grid[i] <= x < grid[i + 1] else 0.0
    left = (x - grid[i]) / (grid[i + k] - grid[i]) * _cox_de_boor(x, grid, i, k - 1)
    right = (grid[i + k + 1] - x) / (grid[i + k + 1] - grid[i + 1]) * _cox_de_boor(x, grid, i + 1, k - 1)
    return left + right


def test_bspline_layer_matches_per_edge_double_loop():
    rng = np.random.default_rng(5)
    layer = BsplineKanLayer(3, 2, KanConfig(grid_size=4, spline_order=3), rng)
    layer.spline_weight.data[...] = rng.normal(size=layer.spline_weight.shape)
    layer.spline_scaler.data[...] = rng.uniform(0.5, 1.5, size=(2, 3))
    x = rng.uniform(-1.3, 1.3, size=(5, 3))

    expected = np.zeros((5, 2))
    for n in range(5):
        for j in range(2):
            for i in range(3):
                xi = x[n, i]
                spline = sum(
                    layer.spline_coefficients[j, i, k] * _cox_de_boor(xi, layer.grid, k, 3)
                    for k in range(layer.num_bases)
                )
                silu = xi / (1.0 + np.exp(-xi))
                expected[n, j] += layer.base_weight.data[j, i] * silu + layer.spline_scaler.data[j, i] * spline
    assert np.allclose(layer(Tensor(x)).data, expected, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(-2.0, 2.0), st.integers(0, 3))
def test_bspline_basis_local_support(x, order):
    grid = make_grid(4, order, (-1.0, 1.0))
    bases = bspline_basis(np.array([x]), grid, order)[0]
    for k in np.flatnonzero(bases != 0.0):
        assert grid[k] <= x < grid[k + order + 1]


def test_fourier_layer_at_zero_is_bias_plus_cosine_sum():
    rng = np.random.default_rng(6)
    layer = FourierKanLayer(3, 4, SMALL, rng)
    layer.bias.data[...] = rng.normal(size=(1, 4))
    out = layer(Tensor(np.zeros((2, 3)))).data
    expected = layer.bias.data + layer.cos_weight.data.sum(axis=1)
    assert np.allclose(out, np.repeat(expected, 2, axis=0), atol=1e-12)


def test_zero_noise_gives_zero_spline_part():
    rng = np.random.default_rng(7)
    layer = BsplineKanLayer(3, 2, KanConfig(scale_noise=0.0), rng)
    assert np.all(layer.spline_weight.data == 0.0)
    x = rng.uniform(-1, 1, size=(4, 3))
    silu = x / (1.0 + np.exp(-x))
    assert np.allclose(layer(Tensor(x)).data, silu @ layer.base_weight.data.T, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(KINDS), st.permutations(list(range(6))))
def test_layer_is_row_permutation_equivariant(kind, perm):
    layer = kan_init(SMALL, 3, 2, seed=0, kind=kind)
    x = np.random.default_rng(2).uniform(-1, 1, size=(6, 3))
    perm = np.array(perm)
    assert np.allclose(layer(Tensor(x[perm])).data, layer(Tensor(x)).data[perm], atol=1e-12)


@pytest.mark.parametrize("cls, name", [(LaplaceKanLayer, "center"), (WaveletKanLayer, "translation")])
def test_positions_start_uniform_inside_grid_range(cls, name):
    config = KanConfig(grid_size=4, grid_range=(-2.0, 0.5))
    a = cls(3, 2, config, np.random.default_rng(11)).parameters()[name].data
    b = cls(3, 2, config, np.random.default_rng(11)).parameters()[name].data
    assert a.shape == (1, 3 * 2 * 4)
    assert np.all((a >= -2.0) & (a < 0.5))
    assert np.unique(a).size == a.size
    assert np.array_equal(a, b)
