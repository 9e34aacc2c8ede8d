"""Assembly backend selection: compiled extension if available, NumPy fallback.

Set ``FOCKBOX_ASSEMBLY=py`` (or ``c``) to force a backend; the default
prefers the compiled kernel.  Both backends implement the same contract and
are tested against each other.
"""

from __future__ import annotations

import os

import numpy as np

from . import _assembly_py

try:
    from . import _assembly as _assembly_c
except ImportError:
    _assembly_c = None


def _pick():
    choice = os.environ.get("FOCKBOX_ASSEMBLY", "").strip().lower()
    if choice == "py":
        return _assembly_py, "python"
    if choice == "c":
        if _assembly_c is None:
            raise ImportError("FOCKBOX_ASSEMBLY=c but the compiled extension is not built")
        return _assembly_c, "compiled"
    if _assembly_c is not None:
        return _assembly_c, "compiled"
    return _assembly_py, "python"


_backend, _backend_name = _pick()


def backend_name() -> str:
    return _backend_name


def assemble(coeffs, opcodes, nops, basis):
    """Dispatch to the selected kernel; see _assembly_py.assemble."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    opcodes = np.ascontiguousarray(opcodes, dtype=np.int32)
    if opcodes.ndim != 2:
        opcodes = opcodes.reshape(len(coeffs), -1)
    nops = np.ascontiguousarray(nops, dtype=np.int32)
    basis = np.ascontiguousarray(basis, dtype=np.uint64)
    return _backend.assemble(coeffs, opcodes, nops, basis)


def assemble_with(backend: str, coeffs, opcodes, nops, basis):
    """Run a specific backend ("python" or "compiled"); used by tests and
    the benchmark."""
    if backend == "python":
        mod = _assembly_py
    elif backend == "compiled":
        if _assembly_c is None:
            raise ImportError("compiled assembly kernel not available")
        mod = _assembly_c
    else:
        raise ValueError(f"unknown backend {backend!r}")
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    opcodes = np.ascontiguousarray(opcodes, dtype=np.int32).reshape(len(coeffs), -1)
    nops = np.ascontiguousarray(nops, dtype=np.int32)
    basis = np.ascontiguousarray(basis, dtype=np.uint64)
    return mod.assemble(coeffs, opcodes, nops, basis)


def available_backends() -> list[str]:
    out = ["python"]
    if _assembly_c is not None:
        out.append("compiled")
    return out
