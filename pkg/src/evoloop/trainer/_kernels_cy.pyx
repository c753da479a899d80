# cython: language_level=3
"""Compiled training kernels: hot-loop twin of ``_kernels_py``.

Same contract as the fallback: masked-NLL, analytic gradient, full-batch
descent with the cosine schedule. Keep both implementations in sync.
"""

import numpy as np

from libc.math cimport exp, log
from libc.stdint cimport int64_t

from .schedule import cosine_lr

IMPL_NAME = "compiled"


cdef void _softmax_rows(double[:, ::1] weights, double[:, ::1] probs) noexcept:
    cdef Py_ssize_t n_ctx = weights.shape[0]
    cdef Py_ssize_t n_tmpl = weights.shape[1]
    cdef Py_ssize_t c, v
    cdef double top, total
    for c in range(n_ctx):
        top = weights[c, 0]
        for v in range(1, n_tmpl):
            if weights[c, v] > top:
                top = weights[c, v]
        total = 0.0
        for v in range(n_tmpl):
            probs[c, v] = exp(weights[c, v] - top)
            total += probs[c, v]
        for v in range(n_tmpl):
            probs[c, v] /= total


def nll(double[:, ::1] weights, int64_t[:] ctx_idx, int64_t[:] tmpl_idx):
    cdef Py_ssize_t n = ctx_idx.shape[0]
    if n == 0:
        return 0.0
    probs_arr = np.empty((weights.shape[0], weights.shape[1]), dtype=np.float64)
    cdef double[:, ::1] probs = probs_arr
    _softmax_rows(weights, probs)
    cdef double total = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        total -= log(probs[ctx_idx[i], tmpl_idx[i]])
    return total


cdef double _nll_grad_into(double[:, ::1] weights, int64_t[:] ctx_idx,
                           int64_t[:] tmpl_idx, double[:, ::1] probs,
                           double[:, ::1] grad) noexcept:
    cdef Py_ssize_t n_ctx = weights.shape[0]
    cdef Py_ssize_t n_tmpl = weights.shape[1]
    cdef Py_ssize_t n = ctx_idx.shape[0]
    cdef Py_ssize_t i, c, v
    cdef double loss = 0.0
    _softmax_rows(weights, probs)
    for c in range(n_ctx):
        for v in range(n_tmpl):
            grad[c, v] = 0.0
    for i in range(n):
        c = ctx_idx[i]
        for v in range(n_tmpl):
            grad[c, v] += probs[c, v]
        grad[c, tmpl_idx[i]] -= 1.0
        loss -= log(probs[c, tmpl_idx[i]])
    return loss


def nll_grad(double[:, ::1] weights, int64_t[:] ctx_idx, int64_t[:] tmpl_idx):
    grad_arr = np.zeros((weights.shape[0], weights.shape[1]), dtype=np.float64)
    if ctx_idx.shape[0] == 0:
        return 0.0, grad_arr
    probs_arr = np.empty_like(grad_arr)
    cdef double loss = _nll_grad_into(weights, ctx_idx, tmpl_idx, probs_arr, grad_arr)
    return loss, grad_arr


def train(double[:, ::1] weights_in, int64_t[:] ctx_idx, int64_t[:] tmpl_idx,
          double lr_initial, double lr_final, int epochs):
    """Full-batch descent; returns (new weights, loss curve of length epochs+1)."""
    cdef Py_ssize_t n_ctx = weights_in.shape[0]
    cdef Py_ssize_t n_tmpl = weights_in.shape[1]
    weights_arr = np.array(weights_in, dtype=np.float64, copy=True)
    curve_arr = np.empty(epochs + 1, dtype=np.float64)
    probs_arr = np.empty((n_ctx, n_tmpl), dtype=np.float64)
    grad_arr = np.empty((n_ctx, n_tmpl), dtype=np.float64)
    cdef double[:, ::1] weights = weights_arr
    cdef double[:, ::1] probs = probs_arr
    cdef double[:, ::1] grad = grad_arr
    cdef double[:] curve = curve_arr
    cdef double lr
    cdef Py_ssize_t t, c, v
    for t in range(epochs):
        curve[t] = _nll_grad_into(weights, ctx_idx, tmpl_idx, probs, grad)
        lr = cosine_lr(t, epochs, lr_initial, lr_final)
        for c in range(n_ctx):
            for v in range(n_tmpl):
                weights[c, v] -= lr * grad[c, v]
    curve[epochs] = nll(weights, ctx_idx, tmpl_idx)
    return weights_arr, curve_arr
