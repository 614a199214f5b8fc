"""The interaction-screening loss for one focal vertex.

For focal vertex u the data enter only through the product rows
g_k = sigma_u^(k) * (sigma_i^(k))_{i != u} in {-1,+1}^(p-1), and the
loss is the empirical average

    S(theta) = (1/n) sum_k exp(-<theta, g_k>),

a smooth convex function whose gradient components are
-(1/n) sum_k g_kl exp(-<theta, g_k>). Because the rows take at most
2^(p-1) values, a NodeView collapses them to distinct rows with
weights; the loss is an average, so this regrouping is exact and makes
evaluation cost independent of n once n exceeds the number of distinct
rows.

Linear forms are clamped to +/-LINEAR_FORM_LIMIT before
exponentiation (exp overflows near 710); evaluations report whether
the clamp fired so callers can flag saturation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InputError
from .sampler import SampleSet

LINEAR_FORM_LIMIT = 700.0


@dataclass
class NodeView:
    """Per-vertex view of a sample set.

    others holds the ascending vertices != u; products is the raw
    n x (p-1) matrix of sigma_u * sigma_i rows when built from a
    SampleSet (None when built directly from weighted counts); basis
    and weights are the distinct rows and their empirical frequencies
    (weights sum to 1); n is the underlying sample count.
    """

    u: int
    others: np.ndarray
    products: np.ndarray | None
    basis: np.ndarray
    weights: np.ndarray
    n: int


def _compress_rows(products: np.ndarray):
    """Collapse duplicate +/-1 rows; returns (distinct rows as float64,
    counts)."""
    n, k = products.shape
    if k == 0:
        return np.zeros((1, 0)), np.array([n], dtype=np.int64)
    if k <= 63:
        shifts = np.arange(k, dtype=np.uint64)
        codes = (products > 0).astype(np.uint64) @ (np.uint64(1) << shifts)
        if k <= 20:
            counts_full = np.bincount(codes.astype(np.int64), minlength=1 << k)
            nonzero = np.nonzero(counts_full)[0]
            codes_u = nonzero.astype(np.uint64)
            counts = counts_full[nonzero]
        else:
            codes_u, counts = np.unique(codes, return_counts=True)
        bits = (codes_u[:, None] >> shifts[None, :]) & np.uint64(1)
        rows = 2.0 * bits.astype(np.float64) - 1.0
        return rows, counts.astype(np.int64)
    rows, counts = np.unique(products, axis=0, return_counts=True)
    return rows.astype(np.float64), counts.astype(np.int64)


def node_view(samples: SampleSet, u: int) -> NodeView:
    """Build the focal-vertex view of a sample set."""
    if not 0 <= u < samples.p:
        raise InputError(f"vertex {u} out of range for p={samples.p}")
    if samples.p < 2:
        raise InputError("need p >= 2 for a nonempty view")
    others = np.delete(np.arange(samples.p), u)
    products = samples.data[:, others] * samples.data[:, [u]]
    rows, counts = _compress_rows(products)
    weights = counts / float(samples.n)
    return NodeView(u, others, products, rows, weights, samples.n)


def node_view_from_counts(u: int, others, rows, counts) -> NodeView:
    """Build a view from distinct product rows and their counts, for
    callers that tally configurations instead of materializing samples."""
    others = np.asarray(others, dtype=np.int64)
    rows = np.asarray(rows, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.int64)
    if rows.ndim != 2 or rows.shape[0] != counts.shape[0]:
        raise InputError("rows and counts must align")
    if rows.shape[1] != others.size:
        raise InputError("row width must match len(others)")
    if np.any(counts < 0) or counts.sum() < 1:
        raise InputError("counts must be nonnegative with positive total")
    if not np.all(np.abs(rows) == 1.0):
        raise InputError("product rows must be -1/+1")
    keep = counts > 0
    rows, counts = rows[keep], counts[keep]
    n = int(counts.sum())
    return NodeView(int(u), others, None, rows, counts / float(n), n)


class Evaluation(NamedTuple):
    value: float
    gradient: np.ndarray
    saturated: bool


def _check_theta(view: NodeView, theta) -> np.ndarray:
    arr = np.asarray(theta, dtype=np.float64)
    if arr.shape != (view.others.size,):
        raise InputError(
            f"theta has shape {arr.shape}, expected ({view.others.size},)"
        )
    return arr


def _clamped_forms(view: NodeView, theta: np.ndarray):
    z = view.basis @ theta
    saturated = bool(z.size) and bool(np.max(np.abs(z)) > LINEAR_FORM_LIMIT)
    if saturated:
        z = np.clip(z, -LINEAR_FORM_LIMIT, LINEAR_FORM_LIMIT)
    return z, saturated


def evaluate(view: NodeView, theta) -> Evaluation:
    """Loss value and gradient in one pass (they share the exp weights)."""
    theta = _check_theta(view, theta)
    z, saturated = _clamped_forms(view, theta)
    w = view.weights * np.exp(-z)
    value = float(np.sum(w, dtype=np.longdouble))
    gradient = -(w @ view.basis)
    return Evaluation(value, gradient, saturated)


def screening_value(view: NodeView, theta) -> float:
    theta = _check_theta(view, theta)
    z, _ = _clamped_forms(view, theta)
    w = view.weights * np.exp(-z)
    return float(np.sum(w, dtype=np.longdouble))


def screening_gradient(view: NodeView, theta) -> np.ndarray:
    return evaluate(view, theta).gradient


def remainder_kernel(z):
    """The convex kernel exp(-z) - 1 + z (>= 0 everywhere); computed
    via expm1 so the quadratic behavior near 0 survives cancellation."""
    z = np.asarray(z, dtype=np.float64)
    z = np.clip(z, -LINEAR_FORM_LIMIT, LINEAR_FORM_LIMIT)
    return np.maximum(np.expm1(-z) + z, 0.0)


def remainder_kernel_floor(z):
    """Quadratic-over-linear lower bound z**2 / (2 + |z|)."""
    z = np.asarray(z, dtype=np.float64)
    return z * z / (2.0 + np.abs(z))


def kernel_bound_pair(z):
    """(kernel value, lower bound) for scalar or array z."""
    return remainder_kernel(z), remainder_kernel_floor(z)


def taylor_remainder(view: NodeView, theta_star, delta) -> float:
    """Second-order remainder S(theta*+delta) - S(theta*) -
    <grad S(theta*), delta>, accumulated term by term as
    w_k exp(-z*_k) kernel(dz_k); every term is nonnegative, so the
    result is too, and small deltas do not cancel."""
    theta_star = _check_theta(view, theta_star)
    delta = _check_theta(view, delta)
    z_star, _ = _clamped_forms(view, theta_star)
    dz = view.basis @ delta
    terms = view.weights * np.exp(-z_star) * remainder_kernel(dz)
    return float(np.sum(terms, dtype=np.longdouble))
