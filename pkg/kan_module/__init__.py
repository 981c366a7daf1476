from kan_module.bspline import bspline_basis, bspline_features, make_grid
from kan_module.checkpoint import load_into, load_named_tensors, save_named_tensors
from kan_module.layers import (
    BsplineKanLayer,
    FourierKanLayer,
    KanConfig,
    KanLayer,
    LaplaceKanLayer,
    WaveletKanLayer,
    build_kan_layer,
    kan_forward,
    kan_init,
)


__all__ = [
    "BsplineKanLayer",
    "FourierKanLayer",
    "KanConfig",
    "KanLayer",
    "LaplaceKanLayer",
    "WaveletKanLayer",
    "bspline_basis",
    "bspline_features",
    "build_kan_layer",
    "kan_forward",
    "kan_init",
    "load_into",
    "load_named_tensors",
    "make_grid",
    "save_named_tensors",
]
