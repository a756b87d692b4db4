"""Batch kernels for corpus-scale scoring.

The corpus pipeline scores hundreds of thousands of alignment lines; the per
link arithmetic is trivial, so throughput is dominated by the segmented
reduction. Links for a chunk of lines are packed into flat int64 arrays with
an offsets vector (CSR style), and the per-line average-anticipation values
come out of one kernel call.

Two interchangeable backends:

- "numba": @njit loop over segments (default when numba imports cleanly)
- "numpy": cumulative-sum segmented reduction, no JIT

Selection: the MONOSTREAM_NUMBA environment variable. "0"/"false"/"no" forces
the numpy path, "1"/"true"/"yes" requires numba (ImportError if missing),
unset/"auto" picks numba when available. Lines with no links yield NaN.
"""

from __future__ import annotations

import os

import numpy as np

_TRUE = ("1", "true", "yes", "on")
_FALSE = ("0", "false", "no", "off")

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


def default_backend() -> str:
    """Resolve the backend from MONOSTREAM_NUMBA (see module docstring)."""
    raw = os.environ.get("MONOSTREAM_NUMBA", "auto").strip().lower()
    if raw in _FALSE:
        return "numpy"
    if raw in _TRUE:
        if not HAS_NUMBA:
            raise ImportError("MONOSTREAM_NUMBA requires numba, which failed to import")
        return "numba"
    return "numba" if HAS_NUMBA else "numpy"


@njit(cache=True)
def _aa_segments_numba(link_i, link_j, offsets, out):  # pragma: no cover - measured via wrapper
    for p in range(offsets.shape[0] - 1):
        start, end = offsets[p], offsets[p + 1]
        if end == start:
            out[p] = np.nan
            continue
        acc = 0
        for k in range(start, end):
            d = link_i[k] - link_j[k]
            if d > 0:
                acc += d
        out[p] = acc / (end - start)


def _aa_segments_numpy(link_i, link_j, offsets, out):
    anticipation = np.maximum(link_i - link_j, 0)
    csum = np.zeros(anticipation.shape[0] + 1, dtype=np.int64)
    np.cumsum(anticipation, out=csum[1:])
    sums = csum[offsets[1:]] - csum[offsets[:-1]]
    counts = offsets[1:] - offsets[:-1]
    np.divide(sums, counts, out=out, where=counts > 0)
    out[counts == 0] = np.nan


def aa_batch(link_i, link_j, offsets, backend: str | None = None) -> np.ndarray:
    """Per-line average anticipation over packed links.

    link_i/link_j hold all links of the chunk back to back; line p owns the
    slice [offsets[p], offsets[p+1]). Returns one float per line, NaN where a
    line has no links.
    """
    link_i = np.ascontiguousarray(link_i, dtype=np.int64)
    link_j = np.ascontiguousarray(link_j, dtype=np.int64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    if offsets.shape[0] == 0 or offsets[0] != 0 or offsets[-1] != link_i.shape[0]:
        raise ValueError("offsets must start at 0 and end at the number of links")
    if backend is None:
        backend = default_backend()
    out = np.empty(offsets.shape[0] - 1, dtype=np.float64)
    if backend == "numba":
        _aa_segments_numba(link_i, link_j, offsets, out)
    elif backend == "numpy":
        _aa_segments_numpy(link_i, link_j, offsets, out)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return out


def pack_links(per_line_links) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flatten per-line [(i, j), ...] lists into (link_i, link_j, offsets)."""
    offsets = np.zeros(len(per_line_links) + 1, dtype=np.int64)
    total = 0
    for idx, links in enumerate(per_line_links):
        total += len(links)
        offsets[idx + 1] = total
    link_i = np.empty(total, dtype=np.int64)
    link_j = np.empty(total, dtype=np.int64)
    pos = 0
    for links in per_line_links:
        for i, j in links:
            link_i[pos] = i
            link_j[pos] = j
            pos += 1
    return link_i, link_j, offsets
