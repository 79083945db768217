"""Hot rate kernels with a compiled core and a pure-numpy fallback.

The per-sample Monte-Carlo work (coupling the i.i.d. beam factors, forming
the selected-antenna Gram, Cholesky log-determinants) dominates suite
runtime, so it is implemented twice: once in Cython (`_core`) and once with
batched numpy (`_fallback`). The compiled core is selected at import when it
built; set MIMOSEL_BACKEND=python to force the fallback.

Both backends consume identical pre-drawn random inputs, so they agree to
floating-point reordering error.
"""

import os

from . import _fallback

BACKEND = "numpy"
rate_samples = _fallback.rate_samples

if os.environ.get("MIMOSEL_BACKEND", "").lower() not in ("python", "numpy"):
    try:
        from . import _core

        rate_samples = _core.rate_samples
        BACKEND = "cython"
    except (ImportError, AttributeError):
        pass

rate_samples_numpy = _fallback.rate_samples
