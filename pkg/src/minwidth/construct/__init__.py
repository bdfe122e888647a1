"""Explicit network builders for each construction step and the full approximators."""
from ._blocks import MAX_LAYERS, embed, select_outputs
from .assemble import LpConstruction, assemble_lp_net, assemble_uniform_net, lp_bound, uniform_budget
from .pl import PLScalarFunction, build_memorizer_net, build_pl_net, build_pl_vector_net, memorizer_function
from .quantizer import build_step_encoder_net, build_step_quantizer_net
from .staircase import (EncoderArtifacts, build_clamp_net, build_decoder_net, build_relu_encoder_net,
                        build_staircase_pair_net, default_alpha, default_encoder_delta)

__all__ = [
    "MAX_LAYERS", "embed", "select_outputs",
    "PLScalarFunction", "build_pl_net", "build_pl_vector_net", "build_memorizer_net", "memorizer_function",
    "build_step_quantizer_net", "build_step_encoder_net",
    "build_staircase_pair_net", "build_decoder_net", "build_clamp_net", "build_relu_encoder_net",
    "EncoderArtifacts", "default_alpha", "default_encoder_delta",
    "assemble_uniform_net", "assemble_lp_net", "LpConstruction", "lp_bound", "uniform_budget",
]
