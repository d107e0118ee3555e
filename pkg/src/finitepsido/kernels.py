"""Backend selection for the inner loops.

The compiled extension ``_kernels`` is used when it was built; otherwise the
NumPy module ``_kernels_py`` is loaded.  Setting ``FINITEPSIDO_PURE_PYTHON=1``
forces the NumPy path.  Both backends stay importable for benchmarks and
cross-checks.
"""
import os

import numpy as np

from . import _kernels_py as python_impl

try:
    from . import _kernels as compiled_impl
except ImportError:  # extension not built
    compiled_impl = None

if compiled_impl is not None and os.environ.get("FINITEPSIDO_PURE_PYTHON", "") in ("", "0"):
    _impl = compiled_impl
    BACKEND = "compiled"
else:
    _impl = python_impl
    BACKEND = "python"


def _c(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def _i(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def twisted_convolution(F, G, P, sub):
    return _impl.twisted_convolution(_c(F), _c(G), _c(P), _i(sub))


def diagonal_envelope(A, sub):
    return _impl.diagonal_envelope(_c(A), _i(sub))


def phase_stft(sigma, psi, P, sub):
    return _impl.phase_stft(_c(sigma), _c(psi), _c(P), _i(sub))


def envelope_sup(V):
    return _impl.envelope_sup(_c(V))
