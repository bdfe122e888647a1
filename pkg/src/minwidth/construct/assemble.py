"""Full approximators: ReLU+Step for the sup norm, ReLU-only for L^p."""
from __future__ import annotations

from dataclasses import dataclass

from ..coding import CodebookTable, build_codebook, error_budget
from ..net import Network, compose_all
from ..targets import TargetFunction
from .pl import build_memorizer_net
from .quantizer import build_step_encoder_net
from .staircase import EncoderArtifacts, build_decoder_net, build_relu_encoder_net


def assemble_uniform_net(target: TargetFunction, K: int, M: int) -> Network:
    """decoder o memorizer o step-encoder, width max(dx+1, dy).

    Sup-norm error against ``target`` on [0,1]^dx is at most ``L 2^-K + 2^-M``.
    """
    table = build_codebook(target, K, M)
    return compose_all(build_step_encoder_net(target.dx, K),
                       build_memorizer_net(table, (0.0, 1.0)),
                       build_decoder_net(target.dy, M))


def lp_bound(dx: int, dy: int, lipschitz: float, K: int, M: int, gamma: float, p: float,
             sup_target: float | None = None, sup_net: float | None = None) -> float:
    """Analytic L^p error bound of the ReLU construction.

    The first term covers the cube minus the bad set; the second charges the
    bad set plus the possibly-zeroed corner box its worst-case error, using
    ``||f||_p <= sup_target`` and ``||net||_p <= sup_net`` pointwise
    (both default to dy^(1/p), the value for maps into [0,1]^dy).
    """
    if not p >= 1:
        raise ValueError("p must be at least 1")
    cap = dy ** (1.0 / p)
    sup_target = cap if sup_target is None else sup_target
    sup_net = cap if sup_net is None else sup_net
    good = dy * (lipschitz * 2.0 ** -K + 2.0 ** -M) ** p
    bad = (2.0 ** (-dx * K) + gamma) * (sup_target + sup_net) ** p
    return float((good + bad) ** (1.0 / p))


@dataclass(frozen=True)
class LpConstruction:
    """The ReLU network together with the facts needed to bound its L^p error."""

    net: Network
    encoder: EncoderArtifacts
    table: CodebookTable
    p: float
    bound: float
    lipschitz: float

    @property
    def zeroed_region(self) -> tuple[float, float]:
        # E_K = [1 - 2^-K, 1]^dx, where the encoder meets the sentinel codeword
        K = self.table.K
        return (1.0 - 2.0 ** -K, 1.0)

    def zeroed_region_text(self) -> str:
        lo, hi = self.zeroed_region
        return f"[{lo:g}, {hi:g}]^{self.table.dx}"

    def report(self) -> dict:
        e = self.encoder
        return {
            "width": self.net.width,
            "depth": self.net.depth,
            "p": self.p,
            "bound": self.bound,
            "gamma": e.gamma,
            "alpha": e.alpha,
            "delta": e.delta,
            "measure_bound": e.measure_bound,
            "sentinel": e.sentinel,
            "excluded": e.excluded,
            "zeroed_region": self.zeroed_region_text(),
        }


def assemble_lp_net(target: TargetFunction, K: int, M: int, gamma: float, p: float,
                    alpha: float | None = None, delta: float | None = None) -> LpConstruction:
    """ReLU-only approximator of width max(dx+1, dy) with zero output off the cube."""
    enc = build_relu_encoder_net(target.dx, K, alpha, delta, gamma)
    table = build_codebook(target, K, M).with_entry(enc.sentinel, 0.0)
    dec = build_decoder_net(target.dy, M)
    net = compose_all(enc.net, build_memorizer_net(table, (0.0, 1.0)), dec)
    bound = lp_bound(target.dx, target.dy, target.lipschitz, K, M, gamma, p)
    return LpConstruction(net, enc, table, float(p), bound, target.lipschitz)


def uniform_budget(target: TargetFunction, K: int, M: int) -> float:
    return error_budget(target.lipschitz, K, M)


__all__ = ["assemble_uniform_net", "assemble_lp_net", "LpConstruction", "lp_bound", "uniform_budget"]
