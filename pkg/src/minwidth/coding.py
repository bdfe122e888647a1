"""Reference quantize / encode / memorize / decode maps.

These are plain numpy functions, independent of any network, and serve as
the oracles the constructed networks are checked against. All values they
produce are dyadic, so float64 holds them exactly while the bit budgets
below are respected.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from decimal import Decimal

import numpy as np

MAX_BITS = 24


class BudgetError(ValueError):
    pass


def check_bits(d: int, n: int, what: str = "codeword") -> None:
    if n < 1 or d < 1:
        raise BudgetError(f"{what}: dimensions and bit counts must be positive")
    if d * n > MAX_BITS:
        raise BudgetError(f"{what} needs {d * n} bits; the cap is {MAX_BITS}")


def grid(n: int) -> np.ndarray:
    """The grid {0, 2^-n, ..., 1 - 2^-n}."""
    return np.arange(2 ** n, dtype=np.float64) / 2.0 ** n


def quantize(x, n: int):
    """Largest grid point of ``grid(n)`` not exceeding ``x``; 1 maps to 1 - 2^-n."""
    xa = np.asarray(x, dtype=np.float64)
    if np.any(xa < 0) or np.any(xa > 1) or np.any(np.isnan(xa)):
        raise ValueError("quantize expects values in [0, 1]")
    scale = 2.0 ** n
    q = np.minimum(np.floor(xa * scale), scale - 1) / scale
    return float(q) if q.ndim == 0 else q


def encode(x, K: int):
    """Pack the K-bit truncations of each coordinate into one scalar.

    ``x`` has shape ``(dx,)`` or ``(n, dx)``.
    """
    xa = np.asarray(x, dtype=np.float64)
    single = xa.ndim == 1
    X = np.atleast_2d(xa)
    check_bits(X.shape[1], K, "encode")
    Q = quantize(X, K)
    weights = 2.0 ** (-K * np.arange(X.shape[1]))
    c = Q @ weights
    return float(c[0]) if single else c


def decode(c, M: int, dy: int, tol: float | None = None):
    """Inverse of ``encode`` on ``grid(M) ** dy``.

    Accepts a scalar or an array of codewords; raises when a codeword is not
    within ``tol`` (default ``2^-(dy*M+4)``) of the grid of spacing ``2^-(dy*M)``.
    """
    check_bits(dy, M, "decode")
    ca = np.asarray(c, dtype=np.float64)
    single = ca.ndim == 0
    ca = np.atleast_1d(ca)
    bits = dy * M
    tol = 2.0 ** -(bits + 4) if tol is None else tol
    scaled = ca * 2.0 ** bits
    idx = np.rint(scaled)
    if np.any(np.abs(scaled - idx) > tol * 2.0 ** bits) or np.any(idx < 0) or np.any(idx >= 2 ** bits):
        raise ValueError("codeword is not on the dyadic grid")
    idx = idx.astype(np.int64)
    mask = (1 << M) - 1
    out = np.empty((ca.shape[0], dy))
    for i in range(dy):
        out[:, i] = ((idx >> ((dy - 1 - i) * M)) & mask) / 2.0 ** M
    return out[0] if single else out


def error_budget(lipschitz: float, K: int, M: int) -> float:
    """Sup-norm error bound ``L * 2^-K + 2^-M`` of the quantized coding scheme."""
    if lipschitz < 0:
        raise ValueError("Lipschitz constant must be nonnegative")
    return lipschitz * 2.0 ** -K + 2.0 ** -M


def grid_vectors(d: int, K: int) -> np.ndarray:
    """All points of grid(K)^d in encode order (first coordinate most significant)."""
    g = grid(K)
    return np.array(list(itertools.product(g, repeat=d)), dtype=np.float64).reshape(-1, d)


@dataclass(frozen=True)
class CodebookTable:
    """Map from input codewords to target codewords, sorted by key."""

    K: int
    M: int
    dx: int
    dy: int
    keys: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        for a in (self.keys, self.values):
            a.setflags(write=False)

    def __len__(self):
        return len(self.keys)

    def lookup(self, c):
        idx = np.searchsorted(self.keys, c)
        ok = (idx < len(self.keys)) & (self.keys[np.minimum(idx, len(self.keys) - 1)] == c)
        if not np.all(ok):
            raise KeyError("codeword not in table")
        return self.values[idx]

    def with_entry(self, key: float, value: float) -> "CodebookTable":
        """Copy of the table with one key (re)assigned."""
        keys = list(self.keys)
        values = list(self.values)
        if key in keys:
            values[keys.index(key)] = value
        else:
            keys.append(key)
            values.append(value)
        order = np.argsort(keys)
        return CodebookTable(self.K, self.M, self.dx, self.dy,
                             np.asarray(keys)[order], np.asarray(values)[order])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["input_codeword", "output_codeword"])
            for k, v in zip(self.keys.tolist(), self.values.tolist()):
                w.writerow([format(Decimal(k), "f"), format(Decimal(v), "f")])

    @classmethod
    def from_csv(cls, path, K: int, M: int, dx: int, dy: int) -> "CodebookTable":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        keys = np.array([float(Decimal(r["input_codeword"])) for r in rows])
        values = np.array([float(Decimal(r["output_codeword"])) for r in rows])
        order = np.argsort(keys)
        return cls(K, M, dx, dy, keys[order], values[order])


def build_codebook(target, K: int, M: int) -> CodebookTable:
    """Tabulate ``encode_M(clip(f*(v)))`` for every grid vector ``v``."""
    check_bits(target.dx, K, "input codebook")
    check_bits(target.dy, M, "output codebook")
    V = grid_vectors(target.dx, K)
    Y = np.clip(np.asarray(target(V), dtype=np.float64).reshape(len(V), target.dy), 0.0, 1.0)
    keys = encode(V, K)
    values = encode(Y, M)
    order = np.argsort(keys)
    return CodebookTable(K, M, target.dx, target.dy, keys[order], values[order])


def coding_scheme(target, X, K: int, M: int) -> np.ndarray:
    """decode_M(memorize(encode_K(x))) evaluated directly; equals q_M(f*(q_K(x)))."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    table = build_codebook(target, K, M)
    return decode(table.lookup(encode(X, K)), M, target.dy)
