"""Constructive selection of hidden-node input weights and biases.

Given anchor samples whose embedding projections are strictly
increasing, each hidden node is assigned a gain ``k_i`` large enough
that, measured in the node's own pre-activation units, every other
anchor lands at distance >= 2*dist from the node's peak. With a
single-peak activation that vanishes at infinity this pushes every
off-diagonal entry of the anchor activation matrix below M/n0^2 while
the bias construction pins each diagonal entry at the peak value M, so
the matrix is strictly diagonally dominant (in the strong, whole-matrix
sense) and therefore nonsingular.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericOverflowError, PreconditionError, ShapeError

__all__ = ["Activation", "GAUSSIAN_RBF", "cutoff_radius", "SelectionParams",
           "select_weights", "row_dot"]


def row_dot(a, b) -> np.ndarray:
    """Per-row dot products of two equally shaped (n, d) arrays.

    The biases are built with exactly this reduction, so re-evaluating a
    node on its own anchor row through ``row_dot`` cancels bit for bit
    and lands exactly on the activation peak.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2:
        raise ShapeError(f"row_dot needs matching 2-D shapes, got {a.shape} "
                         f"and {b.shape}")
    return np.einsum("ij,ij->i", a, b)

_KNOWN_TAGS = ("gaussian-rbf",)


@dataclass(frozen=True)
class Activation:
    """A positive single-peak activation vanishing at +-infinity.

    Only the Gaussian radial basis function ``g(x) = exp(-x^2)`` is
    built in (peak value 1 at 0); the tag leaves room for other members
    of the same class without changing any signatures. Sigmoids are not
    in this class and cannot be used here.
    """

    tag: str = "gaussian-rbf"
    peak_value: float = 1.0
    peak_location: float = 0.0

    def __post_init__(self):
        if self.tag not in _KNOWN_TAGS:
            raise PreconditionError(f"unknown activation tag {self.tag!r}")
        if self.tag == "gaussian-rbf" and (self.peak_value != 1.0
                                           or self.peak_location != 0.0):
            raise PreconditionError(
                "gaussian-rbf has peak value 1 at location 0")

    def apply(self, z):
        z = np.asarray(z, dtype=np.float64)
        return np.exp(-(z * z))


GAUSSIAN_RBF = Activation()


def cutoff_radius(n_hidden: int) -> float:
    """Radius a with g(x) < 1/n_hidden^2 for |x| > a (Gaussian peak inside).

    Computed as ``max(sqrt(|2 ln n|), 1) + 1``; the +1 keeps the bound
    strict and the peak location strictly inside (-a, a).
    """
    if n_hidden < 1:
        raise PreconditionError(f"need at least one hidden node, got {n_hidden}")
    return max(math.sqrt(abs(2.0 * math.log(n_hidden))), 1.0) + 1.0


@dataclass(frozen=True)
class SelectionParams:
    """Result of the constructive selection.

    ``node_weights[i] == gains[i] * embedding_weights`` and
    ``biases[i]`` puts anchor i exactly at the activation peak:
    ``g(node_weights[i] @ anchor_i + biases[i]) == peak_value``.
    Boundary nodes reuse their neighbour's gain.
    """

    n_hidden: int
    cutoff: float
    dist: float
    gains: np.ndarray
    node_weights: np.ndarray
    biases: np.ndarray


def select_weights(anchors, weights, act: Activation = GAUSSIAN_RBF) -> SelectionParams:
    """Select node weights/biases from projection-sorted anchor samples.

    ``anchors`` (n0 x d) must be ordered so that ``anchors @ weights``
    is strictly increasing. Gains are ``2*dist`` over the smaller of the
    two adjacent projection gaps (a single node gets gain 1; with two
    nodes both use the only gap). Overflowing gains — from nearly
    duplicate projections — raise NumericOverflowError rather than
    producing non-finite weights.
    """
    x = np.asarray(anchors, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64).ravel()
    if x.ndim != 2:
        raise ShapeError(f"anchors must be 2-D, got ndim={x.ndim}")
    n0, d = x.shape
    if w.size != d:
        raise ShapeError(f"weights have length {w.size}, anchors have "
                         f"dimension {d}")
    if n0 < 1:
        raise PreconditionError("need at least one anchor")
    proj = x @ w
    if not np.isfinite(proj).all():
        raise NumericOverflowError("anchor projections are not finite")
    gaps = np.diff(proj)
    if n0 >= 2 and not (gaps > 0.0).all():
        raise PreconditionError(
            "anchor projections must be strictly increasing")

    a = cutoff_radius(n0)
    x0 = act.peak_location
    dist = max(a - x0, a + x0)
    gains = np.empty(n0)
    with np.errstate(over="ignore", divide="ignore"):
        if n0 == 1:
            gains[0] = 1.0
        elif n0 == 2:
            gains[:] = 2.0 * dist / gaps[0]
        else:
            gains[1:-1] = 2.0 * dist / np.minimum(gaps[:-1], gaps[1:])
            gains[0] = gains[1]
            gains[-1] = gains[-2]

    with np.errstate(over="ignore", invalid="ignore"):
        node_weights = gains[:, None] * w[None, :]
        biases = x0 - row_dot(node_weights, x)
    if not (np.isfinite(gains).all() and np.isfinite(node_weights).all()
            and np.isfinite(biases).all()):
        raise NumericOverflowError(
            "selection overflowed float64 (nearly duplicate projections?)")
    return SelectionParams(n_hidden=n0, cutoff=a, dist=dist, gains=gains,
                           node_weights=node_weights, biases=biases)
