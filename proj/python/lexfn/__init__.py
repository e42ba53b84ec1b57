"""Lexical-function composition models: adjective matrices and verb tensors."""

from ._lexfn import (
    LexfnError,
    Model,
    average_ranks,
    cosine,
    glf_predict,
    run,
    spearman,
)

__all__ = [
    "LexfnError",
    "Model",
    "average_ranks",
    "cosine",
    "glf_predict",
    "run",
    "spearman",
]
