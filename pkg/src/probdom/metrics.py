"""Quality indicators for approximated Pareto fronts (minimization).

Fronts are arrays of shape (k, m) holding mean objective vectors.
"""

from __future__ import annotations

import numpy as np

from probdom.errors import EmptyReference, IndicatorDomainError, MissingBounds, NoRuns


def _front(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return arr


def crisp_nondominated(points) -> np.ndarray:
    """Non-dominated rows of ``points`` with exact duplicates collapsed."""
    pts = np.unique(_front(points), axis=0)
    keep = []
    for i, p in enumerate(pts):
        dominated = np.any(np.all(pts <= p, axis=1) & np.any(pts < p, axis=1))
        if not dominated:
            keep.append(i)
    return pts[keep]


def build_reference_front(fronts) -> np.ndarray:
    """Non-dominated subset of the union of several fronts."""
    parts = [_front(f) for f in fronts if np.size(f)]
    if not parts:
        raise EmptyReference("no points to build a reference front from")
    return crisp_nondominated(np.vstack(parts))


def epsilon_dominance(approx, reference) -> float:
    """Multiplicative epsilon indicator.

    Smallest factor eps such that every reference point r is weakly dominated
    by some approx point a scaled down by eps, i.e. a_i / eps <= r_i.
    """
    a, r = _front(approx), _front(reference)
    if a.size == 0 or r.size == 0:
        raise IndicatorDomainError("epsilon indicator needs non-empty fronts")
    if np.any(a <= 0) or np.any(r <= 0):
        raise IndicatorDomainError("multiplicative epsilon needs strictly positive objectives")
    ratios = np.max(a[None, :, :] / r[:, None, :], axis=2)
    return float(np.max(np.min(ratios, axis=1)))


def epsilon_additive(approx, reference) -> float:
    """Additive epsilon indicator: smallest shift with a_i - eps <= r_i."""
    a, r = _front(approx), _front(reference)
    if a.size == 0 or r.size == 0:
        raise IndicatorDomainError("epsilon indicator needs non-empty fronts")
    gaps = np.max(a[None, :, :] - r[:, None, :], axis=2)
    return float(np.max(np.min(gaps, axis=1)))


def epsilon(approx, reference, kind: str = "mult") -> float:
    if kind == "mult":
        return epsilon_dominance(approx, reference)
    if kind == "add":
        return epsilon_additive(approx, reference)
    raise ValueError(f"unknown epsilon kind {kind!r}")


def grid_cells(points, lo, hi, divisions: int) -> np.ndarray:
    """Integer hypercube coordinates of ``points``; flat dimensions map to cell 0."""
    pts = _front(points)
    span = hi - lo
    flat = span <= 0
    safe = np.where(flat, 1.0, span)
    cells = np.floor((pts - lo) / safe * divisions).astype(np.int64)
    cells = np.clip(cells, 0, divisions - 1)
    cells[:, flat] = 0
    return cells


def dci(approx, reference, divisions: int = 20, bounds=None) -> float:
    """Grid-distance diversity score in [0, 1].

    Both fronts are quantized onto ``divisions`` cells per dimension over
    ``bounds`` (default: the box around both fronts). The summed distance from
    each occupied approx cell to its nearest occupied reference cell is
    divided by the worst case, every cell sitting a full grid diagonal away.
    """
    a, r = _front(approx), _front(reference)
    if a.size == 0 or r.size == 0:
        raise IndicatorDomainError("DCI needs non-empty fronts")
    if divisions < 1:
        raise ValueError("divisions must be at least 1")
    if bounds is None:
        both = np.vstack([a, r])
        lo, hi = both.min(axis=0), both.max(axis=0)
    else:
        lo, hi = (np.asarray(b, dtype=float) for b in bounds)
    a_cells = np.unique(grid_cells(a, lo, hi, divisions), axis=0)
    r_cells = np.unique(grid_cells(r, lo, hi, divisions), axis=0)
    dist = np.sqrt(((a_cells[:, None, :] - r_cells[None, :, :]) ** 2).sum(axis=2)).min(axis=1)
    per_dim = np.where(hi - lo > 0, divisions - 1, 0)
    diagonal = float(np.sqrt(np.sum(per_dim.astype(float) ** 2)))
    worst = len(a_cells) * diagonal
    if worst == 0:
        return 1.0
    return float(min(max(1.0 - dist.sum() / worst, 0.0), 1.0))


def diagonal_distance(mins, maxs) -> float:
    """Mean Euclidean length of the per-objective (max - min) range vectors."""
    if mins is None or maxs is None:
        raise MissingBounds("diagonal distance needs per-objective bounds")
    lo, hi = _front(mins), _front(maxs)
    if lo.shape != hi.shape or lo.size == 0:
        raise MissingBounds("bounds must be non-empty and of equal shape")
    return float(np.mean(np.linalg.norm(hi - lo, axis=1)))


def final_front(record) -> np.ndarray:
    snap = record.snapshots[-1]
    return snap.means[snap.front_mask]


def median_run_selection(records, reference, kind: str = "mult"):
    """Run with the lower-median final-generation epsilon value."""
    if not records:
        raise NoRuns("no runs to choose from")
    scored = sorted(
        ((epsilon(final_front(rec), reference, kind), i) for i, rec in enumerate(records)),
    )
    return records[scored[(len(scored) - 1) // 2][1]]
