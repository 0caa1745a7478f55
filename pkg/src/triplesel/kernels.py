"""Kernel selection: compiled extension if available, pure Python otherwise.

Importers use `from .kernels import qf_count, ...`; the active implementation
is reported by IMPL ("cython" or "pure") and HAVE_FAST.
"""

from __future__ import annotations

try:
    from . import _fastcore as _impl

    IMPL = "cython"
    HAVE_FAST = True
except ImportError:  # pragma: no cover - depends on build environment
    from . import _purecore as _impl

    IMPL = "pure"
    HAVE_FAST = False

from . import _purecore as pure

ap_odd = _impl.ap_odd
apsq_inert = _impl.apsq_inert
qf_count = _impl.qf_count
qf_theta = _impl.qf_theta
qf_vectors = _impl.qf_vectors
qf_count_two = _impl.qf_count_two
qf_vectors_two = _impl.qf_vectors_two
qf_min_norm = _impl.qf_min_norm
apsq_inert_alt = _impl.apsq_inert_alt
