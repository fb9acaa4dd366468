"""Pick the compiled kernels when available, else the numpy fallback.

Set ``AITEST_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

if os.environ.get("AITEST_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
        BACKEND = "python"

build_tree = _impl.build_tree
predict_trees = _impl.predict_trees
permuted_hsic_sums = _impl.permuted_hsic_sums
