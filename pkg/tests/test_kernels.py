import numpy as np
import pytest

from evoloop.trainer import kernels
from evoloop.trainer._kernels_py import IMPL_NAME as PURE_NAME

IMPLS = kernels.available_impls()
COMPILED_PRESENT = "compiled" in IMPLS


def random_problem(seed, n_ctx=12, n_tmpl=6, n_occ=300):
    rng = np.random.default_rng(seed)
    weights = rng.normal(0.0, 1.5, (n_ctx, n_tmpl))
    ctx = rng.integers(0, n_ctx, n_occ).astype(np.int64)
    tmpl = rng.integers(0, n_tmpl, n_occ).astype(np.int64)
    return weights, ctx, tmpl


class TestFallbackKernel:
    def test_train_curve_shape_and_monotonicity(self):
        weights, ctx, tmpl = random_problem(3)
        pure = IMPLS[PURE_NAME]
        new_weights, curve = pure.train(weights, ctx, tmpl, 5e-5, 5e-6, 40)
        assert curve.shape == (41,)
        assert all(a >= b - 1e-12 for a, b in zip(curve, curve[1:]))
        assert not np.shares_memory(new_weights, weights)

    def test_empty_occurrences(self):
        weights = np.zeros((2, 6))
        empty = np.empty(0, dtype=np.int64)
        pure = IMPLS[PURE_NAME]
        assert pure.nll(weights, empty, empty) == 0.0
        loss, grad = pure.nll_grad(weights, empty, empty)
        assert loss == 0.0 and not grad.any()


@pytest.mark.skipif(not COMPILED_PRESENT, reason="compiled kernel not built")
class TestImplEquivalence:
    @pytest.mark.parametrize("seed", range(5))
    def test_nll_and_grad_agree(self, seed):
        weights, ctx, tmpl = random_problem(seed)
        pure, compiled = IMPLS[PURE_NAME], IMPLS["compiled"]
        assert np.isclose(pure.nll(weights, ctx, tmpl), compiled.nll(weights, ctx, tmpl),
                          rtol=1e-12, atol=0)
        loss_p, grad_p = pure.nll_grad(weights, ctx, tmpl)
        loss_c, grad_c = compiled.nll_grad(weights, ctx, tmpl)
        assert np.isclose(loss_p, loss_c, rtol=1e-12, atol=0)
        assert np.allclose(grad_p, grad_c, rtol=1e-10, atol=1e-14)

    @pytest.mark.parametrize("seed", range(3))
    def test_train_agrees(self, seed):
        weights, ctx, tmpl = random_problem(seed, n_occ=150)
        pure, compiled = IMPLS[PURE_NAME], IMPLS["compiled"]
        w_p, curve_p = pure.train(weights, ctx, tmpl, 5e-5, 5e-6, 50)
        w_c, curve_c = compiled.train(weights, ctx, tmpl, 5e-5, 5e-6, 50)
        assert np.allclose(w_p, w_c, rtol=1e-10, atol=1e-15)
        assert np.allclose(curve_p, curve_c, rtol=1e-10, atol=0)

    def test_selected_impl_is_reported(self):
        assert kernels.IMPL_NAME in IMPLS
