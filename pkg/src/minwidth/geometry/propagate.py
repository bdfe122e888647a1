"""Reformulation of width-2 ReLU nets R -> R^2 and exact propagation of curve images."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..net import Activation, Network
from .planar import Affine, Box, Polyline, Quadrant

PERTURBATION = Fraction(1, 10 ** 9)


@dataclass(frozen=True)
class Reformulation:
    """f = (phi_{L-1}^-1 o relu o phi_{L-1}) o ... o (phi_1^-1 o relu o phi_1) o t_dagger.

    ``phis[l-1]`` is phi_l = (t_L o ... o t_{l+1})^-1 and ``phi_invs`` its inverse.
    ``affines`` holds t_1..t_L after any perturbation of singular maps.
    """

    t_dagger: Affine
    phis: tuple
    phi_invs: tuple
    affines: tuple
    perturbed: tuple

    @property
    def n_hidden(self) -> int:
        return len(self.phis)

    def quadrant(self, l: int) -> Quadrant:
        return Quadrant.of(self.phis[l - 1])

    def to_float(self) -> "Reformulation":
        return Reformulation(self.t_dagger.to_float(), tuple(p.to_float() for p in self.phis),
                             tuple(p.to_float() for p in self.phi_invs),
                             tuple(a.to_float() for a in self.affines), self.perturbed)


def check_width2(net: Network) -> None:
    if net.dx != 1 or net.dy != 2:
        raise ValueError("expected a network R -> R^2")
    for L in net.layers[:-1]:
        if L.d_out != 2 or any(a is not Activation.RELU for a in L.activations):
            raise ValueError("every hidden layer must have two ReLU neurons")


def _fix_singular(t: Affine, eps: Fraction) -> Affine:
    (a, b), (c, d) = t.A
    for k in range(1, 64):
        e = eps * k
        cand = Affine(((a + e, b), (c, d + e)), t.b)
        if cand.det() != 0:
            return cand
    raise ArithmeticError("could not perturb a singular layer")  # pragma: no cover


def reformulate(net: Network, eps: Fraction = PERTURBATION) -> Reformulation:
    check_width2(net)
    affines = [Affine.from_arrays(L.weights, L.bias) for L in net.layers]
    perturbed = []
    for i in range(1, len(affines)):
        if affines[i].det() == 0:
            affines[i] = _fix_singular(affines[i], eps)
            perturbed.append(i + 1)
    L = len(affines)
    # phi_inv[l] = t_L o ... o t_{l+1}, built from the top down
    phi_invs = [None] * L
    acc = affines[-1]
    for l in range(L - 1, 0, -1):
        phi_invs[l] = acc
        if l > 1:
            acc = acc.after(affines[l - 1])
    phi_invs = phi_invs[1:]
    t_dagger = phi_invs[0].after(affines[0]) if phi_invs else affines[0]
    phis = tuple(p.inverse() for p in phi_invs)
    return Reformulation(t_dagger, phis, tuple(phi_invs), tuple(affines), tuple(perturbed))


def fold(phi: Affine, phi_inv: Affine, curve: Polyline, simplify: bool = True) -> Polyline:
    """Apply phi^-1 o relu o phi to a polyline, splitting segments at the activation lines."""
    ts, us = list(curve.ts), [phi(p) for p in curve.points]
    out_t, out_u = [ts[0]], [us[0]]
    for i in range(len(ts) - 1):
        u0, u1 = us[i], us[i + 1]
        cuts = set()
        for k in range(2):
            if (u0[k] < 0 < u1[k]) or (u1[k] < 0 < u0[k]):
                cuts.add(u0[k] / (u0[k] - u1[k]))
        for s in sorted(cuts):
            out_t.append(ts[i] + s * (ts[i + 1] - ts[i]))
            out_u.append((u0[0] + s * (u1[0] - u0[0]), u0[1] + s * (u1[1] - u0[1])))
        out_t.append(ts[i + 1])
        out_u.append(u1)
    zero = out_u[0][0] * 0
    pts = []
    for u in out_u:
        pts.append(phi_inv((u[0] if u[0] > 0 else zero, u[1] if u[1] > 0 else zero)))
    img = Polyline(tuple(out_t), tuple(pts))
    return img.simplified() if simplify else img


def initial_curve(ref: Reformulation, ts=(0, 1), as_exact: bool = True) -> Polyline:
    conv = Fraction if as_exact else float
    ts = tuple(sorted({conv(t) for t in ts}))
    td = ref.t_dagger if as_exact else ref.t_dagger.to_float()
    return Polyline(ts, tuple(td((t,)) for t in ts))


def propagate(net, curve: Polyline | None = None, ts=(0, 1), as_exact: bool = True,
              simplify: bool = True) -> list:
    """Images g_0 = t_dagger(curve), g_1, ..., g_{L-1} of the parameter curve.

    ``net`` may be a Network or a Reformulation. Without ``curve`` the start
    is t_dagger applied to the parameter breakpoints ``ts``; a given curve is
    taken to live in output coordinates already.
    """
    ref = net if isinstance(net, Reformulation) else reformulate(net)
    if not as_exact:
        ref = ref.to_float()
    g = initial_curve(ref, ts, as_exact) if curve is None else curve
    images = [g]
    for phi, phi_inv in zip(ref.phis, ref.phi_invs):
        g = fold(phi, phi_inv, g, simplify)
        images.append(g)
    return images


def fixes_box(q: Quadrant, box: Box) -> bool:
    return all(q.contains(c) for c in box.corners)


def find_box_stable_layer(net, box: Box = Box()) -> int:
    """Largest hidden layer index whose fold moves part of ``box`` (0 if none does)."""
    ref = net if isinstance(net, Reformulation) else reformulate(net)
    for l in range(ref.n_hidden, 0, -1):
        if not fixes_box(ref.quadrant(l), box):
            return l
    return 0


def layer_image(ref: Reformulation, l: int, x):
    """phi_l^-1 o relu o phi_l applied to a single point."""
    u = ref.phis[l - 1](x)
    zero = u[0] * 0
    return ref.phi_invs[l - 1]((max(u[0], zero), max(u[1], zero)))
