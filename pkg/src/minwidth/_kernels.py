"""Forward-pass kernels.

Networks are packed into flat arrays so a single compiled loop can walk
every layer. The numba path is used when numba imports and
``MINWIDTH_BACKEND`` is not ``numpy``; the numpy path is always available
and is the reference the benchmark compares against.
"""
import os

import numpy as np

ACT_ID = 0
ACT_RELU = 1
ACT_STEP = 2

_requested = os.environ.get("MINWIDTH_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"MINWIDTH_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    if _requested == "numpy":
        raise ImportError("numba disabled by MINWIDTH_BACKEND")
    import numba
    from numba import njit, prange

    # prefer layers that need no external TBB runtime
    if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def pack(layers):
    """Flatten (weights, bias, act_codes) triples into contiguous arrays."""
    dims = [layers[0][0].shape[1]] + [w.shape[0] for w, _, _ in layers]
    w_off = np.zeros(len(layers) + 1, dtype=np.int64)
    b_off = np.zeros(len(layers) + 1, dtype=np.int64)
    for i, (w, b, _) in enumerate(layers):
        w_off[i + 1] = w_off[i] + w.size
        b_off[i + 1] = b_off[i] + b.size
    w_flat = np.concatenate([w.ravel() for w, _, _ in layers]).astype(np.float64)
    b_flat = np.concatenate([b for _, b, _ in layers]).astype(np.float64)
    acts = np.concatenate([a for _, _, a in layers]).astype(np.int8)
    return (np.asarray(dims, dtype=np.int64), w_flat, b_flat, acts, w_off, b_off)


def forward_numpy(X, packed):
    dims, w_flat, b_flat, acts, w_off, b_off = packed
    H = X
    for i in range(len(dims) - 1):
        W = w_flat[w_off[i]:w_off[i + 1]].reshape(dims[i + 1], dims[i])
        b = b_flat[b_off[i]:b_off[i + 1]]
        a = acts[b_off[i]:b_off[i + 1]]
        Z = H @ W.T + b
        relu = a == ACT_RELU
        step = a == ACT_STEP
        if relu.any():
            Z[:, relu] = np.maximum(Z[:, relu], 0.0)
        if step.any():
            Z[:, step] = (Z[:, step] >= 0.0).astype(np.float64)
        H = Z
    return H


if HAS_NUMBA:

    @njit(cache=True, parallel=True)
    def _forward_jit(X, dims, w_flat, b_flat, acts, w_off, b_off):
        n = X.shape[0]
        n_layers = dims.shape[0] - 1
        width = 0
        for i in range(dims.shape[0]):
            if dims[i] > width:
                width = dims[i]
        out = np.empty((n, dims[n_layers]))
        for p in prange(n):
            cur = np.empty(width)
            nxt = np.empty(width)
            for j in range(dims[0]):
                cur[j] = X[p, j]
            for i in range(n_layers):
                d_in = dims[i]
                d_out = dims[i + 1]
                wo = w_off[i]
                bo = b_off[i]
                for r in range(d_out):
                    s = 0.0
                    for c in range(d_in):
                        s += w_flat[wo + r * d_in + c] * cur[c]
                    s += b_flat[bo + r]
                    a = acts[bo + r]
                    if a == 1:
                        if s < 0.0:
                            s = 0.0
                    elif a == 2:
                        s = 1.0 if s >= 0.0 else 0.0
                    nxt[r] = s
                for r in range(d_out):
                    cur[r] = nxt[r]
            for r in range(dims[n_layers]):
                out[p, r] = cur[r]
        return out

    def forward_numba(X, packed):
        dims, w_flat, b_flat, acts, w_off, b_off = packed
        return _forward_jit(np.ascontiguousarray(X, dtype=np.float64), dims, w_flat,
                            b_flat, acts, w_off, b_off)

    forward = forward_numba
    BACKEND = "numba"
else:
    forward_numba = None
    forward = forward_numpy
    BACKEND = "numpy"
