"""Pure-Python (numpy) training kernels: the fallback implementation.

Semantics are shared with the compiled kernel in ``_kernels_cy.pyx``:
masked-NLL over (context row, template) occurrence pairs, its analytic
gradient (softmax minus one-hot accumulated per occurrence), and full-batch
gradient descent under the cosine schedule. The two implementations agree
to float tolerance; a run uses whichever was selected at import, so results
stay bit-reproducible within an environment.
"""

from __future__ import annotations

import numpy as np

from .schedule import cosine_lr

IMPL_NAME = "pure-python"


def _softmax_rows(weights: np.ndarray) -> np.ndarray:
    shifted = weights - weights.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def nll(weights: np.ndarray, ctx_idx: np.ndarray, tmpl_idx: np.ndarray) -> float:
    if len(ctx_idx) == 0:
        return 0.0
    probs = _softmax_rows(weights)
    return float(-np.log(probs[ctx_idx, tmpl_idx]).sum())


def nll_grad(weights: np.ndarray, ctx_idx: np.ndarray,
             tmpl_idx: np.ndarray) -> tuple[float, np.ndarray]:
    grad = np.zeros_like(weights)
    if len(ctx_idx) == 0:
        return 0.0, grad
    probs = _softmax_rows(weights)
    np.add.at(grad, ctx_idx, probs[ctx_idx])
    np.subtract.at(grad, (ctx_idx, tmpl_idx), 1.0)
    loss = float(-np.log(probs[ctx_idx, tmpl_idx]).sum())
    return loss, grad


def train(weights: np.ndarray, ctx_idx: np.ndarray, tmpl_idx: np.ndarray,
          lr_initial: float, lr_final: float, epochs: int) -> tuple[np.ndarray, np.ndarray]:
    """Full-batch descent; returns (new weights, loss curve of length epochs+1).

    curve[t] is the loss before update t; curve[epochs] is the final loss.
    """
    weights = weights.copy()
    curve = np.empty(epochs + 1)
    for t in range(epochs):
        loss, grad = nll_grad(weights, ctx_idx, tmpl_idx)
        curve[t] = loss
        weights -= cosine_lr(t, epochs, lr_initial, lr_final) * grad
    curve[epochs] = nll(weights, ctx_idx, tmpl_idx)
    return weights, curve
