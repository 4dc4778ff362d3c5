from nn.attention import DeformableCrossAttention, MultiHeadSelfAttention
from nn.encoding import grid_position_embedding, position_embedding_2d, sinusoidal_pe
from nn.layers import MLP, FeedForward, LayerNorm, Linear
from nn.module import Module, Parameter
from nn.tensor import Tensor, no_grad

__all__ = [
    "DeformableCrossAttention",
    "FeedForward",
    "LayerNorm",
    "Linear",
    "MLP",
    "Module",
    "MultiHeadSelfAttention",
    "Parameter",
    "Tensor",
    "grid_position_embedding",
    "no_grad",
    "position_embedding_2d",
    "sinusoidal_pe",
]
