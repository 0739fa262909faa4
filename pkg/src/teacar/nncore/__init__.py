"""From-scratch CNN engine for the steering controllers."""

from . import backend
from .arch import (
    ARCH_IDS,
    ARCHS,
    INPUT_SHAPE,
    LayerSpec,
    ModelArch,
    build_network,
    forward,
    get_arch,
    image_to_input,
    output_shapes,
    param_count,
)
from .layers import Conv2d, Flatten, Linear, Network, ReLU, Tanh
from .train import Adam, Sgd, TrainConfig, backward_and_step, batch_input, evaluate_mse, fit, mse_loss
from .weights_io import load_weights, save_weights

__all__ = [
    "backend",
    "ARCHS",
    "ARCH_IDS",
    "INPUT_SHAPE",
    "LayerSpec",
    "ModelArch",
    "get_arch",
    "output_shapes",
    "param_count",
    "build_network",
    "forward",
    "image_to_input",
    "Conv2d",
    "Linear",
    "ReLU",
    "Tanh",
    "Flatten",
    "Network",
    "TrainConfig",
    "Sgd",
    "Adam",
    "mse_loss",
    "backward_and_step",
    "batch_input",
    "evaluate_mse",
    "fit",
    "save_weights",
    "load_weights",
]
