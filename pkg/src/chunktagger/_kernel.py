"""Kernel selection: compiled Viterbi extension when available, otherwise
the pure-Python twin.  CHUNKTAGGER_PURE=1 forces the fallback (used by the
parity tests and the benchmark)."""

from __future__ import annotations

import os

from . import _viterbi_py

_compiled = None
if os.environ.get("CHUNKTAGGER_PURE", "") != "1":
    try:
        from . import _viterbi as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "pure"

# Dense bigram matrices above this entry count are not worth the memory;
# such models decode through the pure kernel.
_DENSE_LIMIT = 8_000_000


def build_tables(model):
    if _compiled is not None:
        k = len(model.alphabet)
        if (k + 2) * (k + 1) <= _DENSE_LIMIT:
            return ("compiled", _compiled.build_tables(model))
    return ("pure", _viterbi_py.build_tables(model))


def viterbi_path(tables, allowed, emis):
    kind, data = tables
    if kind == "compiled":
        return _compiled.viterbi_path(data, allowed, emis)
    return _viterbi_py.viterbi_path(data, allowed, emis)
