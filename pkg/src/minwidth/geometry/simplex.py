"""Volumetric lower bound for approximating a simplex tour, and an affinity witness for ReLU nets."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..net import Activation, Network, evaluate


def simplex_vertices(dy: int) -> np.ndarray:
    """dy+1 vertices of a regular simplex with side sqrt(2), embedded isometrically in R^dy.

    They are the standard basis of R^(dy+1) expressed in an orthonormal basis
    of the hyperplane orthogonal to the all-ones vector.
    """
    if dy < 1:
        raise ValueError("dy must be at least 1")
    H = np.zeros((dy, dy + 1))
    for k in range(1, dy + 1):
        H[k - 1, :k] = 1.0
        H[k - 1, k] = -k
        H[k - 1] /= math.sqrt(k * (k + 1))
    return H.T.copy()


def simplex_volume(dy: int) -> float:
    return math.sqrt(dy + 1) / math.factorial(dy)


def determinant_volume(V: np.ndarray) -> float:
    dy = V.shape[1]
    return abs(float(np.linalg.det((V[1:] - V[0]).T))) / math.factorial(dy)


def geometric_bound(dy: int) -> float:
    """Lower bound on max_i dist(v_i, H) over hyperplanes H."""
    return math.sqrt(dy + 1) / (2 * math.factorial(dy)) * math.gamma((dy + 1) / 2) * (2 / math.pi) ** ((dy - 1) / 2)


def epsilon(dy: int, p: float) -> float:
    """The L^p gap below which width dy-1 networks cannot approximate the simplex tour."""
    if not p >= 1:
        raise ValueError("p must be at least 1")
    base = geometric_bound(dy) / (2 * dy + 1) ** (1 / p)
    return dy ** (1 / p - 0.5) * base if p >= 2 else base


def max_vertex_distance(V: np.ndarray, normal: np.ndarray, offset: float | None = None) -> float:
    """max_i |<n, v_i> - c| / |n|; with no offset, the best one (the midrange) is used."""
    n = np.asarray(normal, dtype=np.float64)
    norm = np.linalg.norm(n)
    proj = V @ n / norm
    if offset is None:
        return float((proj.max() - proj.min()) / 2)
    return float(np.max(np.abs(proj - offset / norm)))


@dataclass(frozen=True)
class SimplexBound:
    dy: int
    p: float
    vertices: np.ndarray
    epsilon: float
    geometric_bound: float
    volume: float
    determinant_volume: float
    monte_carlo_min: float | None
    refined_min: float | None
    trials: int

    def as_dict(self) -> dict:
        return {
            "dy": self.dy, "p": self.p, "epsilon": self.epsilon, "geometric_bound": self.geometric_bound,
            "volume": self.volume, "determinant_volume": self.determinant_volume,
            "monte_carlo_min": self.monte_carlo_min, "refined_min": self.refined_min, "trials": self.trials,
            "vertices": self.vertices.tolist(),
        }


def simplex_bound(dy: int, p: float = 2.0, trials: int = 10_000, seed: int = 0, refine: int = 20) -> SimplexBound:
    """Simplex vertices, the epsilon value, and a Monte-Carlo plus descent search over hyperplanes.

    Each random hyperplane gets the offset minimizing its worst vertex distance,
    so the sampled minima are as small as the normal direction allows.
    """
    V = simplex_vertices(dy)
    mc = refined = None
    if trials > 0:
        rng = np.random.default_rng(seed)
        N = rng.normal(size=(trials, dy))
        N /= np.linalg.norm(N, axis=1, keepdims=True)
        P = N @ V.T
        vals = (P.max(axis=1) - P.min(axis=1)) / 2
        mc = float(vals.min())
        refined = mc
        for i in np.argsort(vals)[:refine]:
            res = minimize(lambda n: max_vertex_distance(V, n) if np.linalg.norm(n) > 1e-12 else np.inf,
                           N[i], method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
            refined = min(refined, float(res.fun))
    return SimplexBound(dy, float(p), V, epsilon(dy, p), geometric_bound(dy), simplex_volume(dy),
                        determinant_volume(V), mc, refined, trials)


class PreconditionError(ValueError):
    """Some hidden preactivation on the segment is not strictly positive."""


def preactivations(net: Network, X) -> list:
    """Hidden-layer preactivations for a batch of inputs, one array per hidden layer."""
    h = np.atleast_2d(np.asarray(X, dtype=np.float64))
    out = []
    for L in net.layers[:-1]:
        z = h @ L.weights.T + L.bias
        out.append(z)
        h = z.copy()
        for j, a in enumerate(L.activations):
            if a is Activation.RELU:
                h[:, j] = np.maximum(z[:, j], 0.0)
            elif a is Activation.STEP:
                h[:, j] = (z[:, j] >= 0).astype(np.float64)
    return out


def check_affine_on_S(net: Network, x1, x2, samples: int = 33, tol: float = 1e-9) -> bool:
    """Affinity witness on a segment where every hidden ReLU is strictly active.

    Raises PreconditionError when the segment leaves that region; otherwise
    compares the midpoint value with the average of the endpoint values.
    """
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    s = np.linspace(0.0, 1.0, max(samples, 3))
    X = x1[None, :] + s[:, None] * (x2 - x1)[None, :]
    for l, z in enumerate(preactivations(net, X), start=1):
        if np.any(z <= 0):
            i, j = np.argwhere(z <= 0)[0]
            raise PreconditionError(f"preactivation of neuron {j} in hidden layer {l} is {z[i, j]:.3g} "
                                    f"at segment parameter {s[i]:.3g}")
    y1, y2, ym = evaluate(net, np.stack([x1, x2, (x1 + x2) / 2]))
    scale = max(1.0, float(np.max(np.abs(np.concatenate([y1, y2])))))
    return bool(np.max(np.abs(ym - (y1 + y2) / 2)) <= tol * scale)
