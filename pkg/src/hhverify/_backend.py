"""Kernel selection: the compiled Jacobi extension when importable, else pure Python.

Set ``HHVERIFY_BACKEND=python`` to force the fallback.
"""

import os

from . import _jacobi_py

BACKEND = "python"
jacobi_eigh_batch = _jacobi_py.jacobi_eigh_batch

if os.environ.get("HHVERIFY_BACKEND", "").lower() != "python":
    try:
        from ._jacobi_ext import jacobi_eigh_batch  # noqa: F811
    except ImportError:
        pass
    else:
        BACKEND = "cython"
