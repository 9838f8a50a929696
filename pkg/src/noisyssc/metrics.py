"""Clustering accuracy under the best matching of predicted to true labels."""
from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DimensionMismatch


def confusion(pred, truth):
    pred, truth = np.asarray(pred).ravel(), np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise DimensionMismatch(f"{pred.size} predictions for {truth.size} labels")
    p_vals, p_idx = np.unique(pred, return_inverse=True)
    t_vals, t_idx = np.unique(truth, return_inverse=True)
    M = np.zeros((p_vals.size, t_vals.size), dtype=int)
    np.add.at(M, (p_idx, t_idx), 1)
    return M


def accuracy(pred, truth) -> float:
    """Fraction of points labelled correctly after optimally renaming clusters.

    Uses the Hungarian method on the confusion matrix, which attains the
    maximum over all one-to-one label maps. ``pred`` may be a ClusterAssignment.
    """
    pred = getattr(pred, "labels", pred)
    M = confusion(pred, truth)
    if M.size == 0:
        return 1.0
    rows, cols = linear_sum_assignment(-M)
    return float(M[rows, cols].sum() / M.sum())
