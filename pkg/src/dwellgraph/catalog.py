"""Reference switched systems used in the documentation and the test-suite.

``example1``: four rotated/scaled copies ``A_k = U^-k A U^k`` of a 3x3
matrix with eigenvalues ``0.6 +- 0.6i`` and ``-0.4``, with three switching
digraphs (fully connected, one-sided ring, two-sided ring).

``example2``: a two-mode system whose eigenvector bases are badly scaled
relative to each other, so diagonal rescaling matters.
"""

import math

import numpy as np

from .errors import UnknownExample
from .graph import fully_connected, ring

__all__ = ["example1_matrices", "example1_adjacencies", "example2_matrices", "get_example",
           "EXAMPLES"]

_A = np.array([[-0.2, 1.0, 0.0],
               [-1.0, 1.4, 0.0],
               [0.0, 0.0, -0.4]])


def _rotation_scaling():
    c, s = math.cos(math.pi / 3), math.sin(math.pi / 3)
    return np.array([[1.2, 0.0, 0.0],
                     [0.0, c, s],
                     [0.0, -s, c]])


def example1_matrices():
    """``[U^-k A U^k for k in 0..3]``."""
    U = _rotation_scaling()
    U_inv = np.linalg.inv(U)
    mp = np.linalg.matrix_power
    return [mp(U_inv, k) @ _A @ mp(U, k) for k in range(4)]


def example1_adjacencies():
    """``{"G1": full, "G2": one-sided ring, "G3": two-sided ring}`` on four nodes."""
    return {"G1": fully_connected(4), "G2": ring(4), "G3": ring(4, two_sided=True)}


def example2_matrices():
    A1 = np.array([[-0.38, 0.2, 0.1],
                   [-0.16, 0.72, 0.16],
                   [-0.24, 0.24, 0.8]])
    A2 = np.array([[-0.8, -0.07, 0.04],
                   [0.1, -1.0, 0.05],
                   [-0.1, -0.06, -0.34]])
    return [A1, A2]


EXAMPLES = ("example1", "example2")


def get_example(name):
    """``(matrices, {label: Adjacency})`` for a named example."""
    if name == "example1":
        return example1_matrices(), example1_adjacencies()
    if name == "example2":
        return example2_matrices(), {"full": fully_connected(2)}
    raise UnknownExample(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
