"""Kernel selection: compiled extension when available, numpy fallback.

Set ``EVOLOOP_PURE=1`` to force the fallback (used by the benchmark and by
tests that compare the two implementations).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("EVOLOOP_PURE") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

IMPL_NAME = _impl.IMPL_NAME
nll = _impl.nll
nll_grad = _impl.nll_grad
train = _impl.train


def available_impls() -> dict:
    """Both kernel modules, keyed by name; compiled only if importable."""
    impls = {_kernels_py.IMPL_NAME: _kernels_py}
    try:
        from . import _kernels_cy
        impls[_kernels_cy.IMPL_NAME] = _kernels_cy
    except ImportError:
        pass
    return impls
