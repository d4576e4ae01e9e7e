"""Pure-Python implementations of the hot kernels.

These are the reference versions; ``_ckernels.pyx`` mirrors them line for line.
Point arrays passed in must already be deduplicated and sorted
lexicographically (x, then y).
"""

from __future__ import annotations

import numpy as np

EUCLIDEAN = 0
CORRELATION = 1


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _chain(pts, order, eps):
    chain = []
    for i in order:
        p = pts[i]
        while len(chain) >= 2 and _cross(pts[chain[-2]], pts[chain[-1]], p) <= eps:
            chain.pop()
        chain.append(i)
    return chain


def hull_indices(xy, eps):
    """Strict convex hull by monotone chain; CCW indices starting at index 0.

    Collinear input yields the two extreme indices.
    """
    pts = [tuple(p) for p in np.asarray(xy, dtype=np.float64).tolist()]
    n = len(pts)
    if n == 0:
        return []
    if n == 1:
        return [0]
    lower = _chain(pts, range(n), eps)
    upper = _chain(pts, range(n - 1, -1, -1), eps)
    return lower[:-1] + upper[:-1]


def peel_layers(xy, eps):
    """Convex layers as lists of indices into ``xy``, outermost first.

    Peeling stops once fewer than three points remain; those are not returned.
    """
    pts = [tuple(p) for p in np.asarray(xy, dtype=np.float64).tolist()]
    remaining = list(range(len(pts)))
    layers = []
    while len(remaining) >= 3:
        sub = [pts[i] for i in remaining]
        lower = _chain(sub, range(len(sub)), eps)
        upper = _chain(sub, range(len(sub) - 1, -1, -1), eps)
        local = lower[:-1] + upper[:-1]
        layer = [remaining[j] for j in local]
        layers.append(layer)
        taken = set(local)
        remaining = [idx for j, idx in enumerate(remaining) if j not in taken]
    return layers


def shift_distances(a, b, rings, metric):
    """Distance between ``a`` and every wedge-rotation of ``b``.

    Both vectors are viewed as ``rings`` rows of equal width W; entry s of the
    result compares ``a`` against ``b`` rolled left by s along each row.
    """
    a = np.asarray(a, dtype=np.float64).reshape(rings, -1)
    b = np.asarray(b, dtype=np.float64).reshape(rings, -1)
    width = a.shape[1]
    idx = (np.arange(width)[None, :] + np.arange(width)[:, None]) % width
    shifted = b[:, idx].transpose(1, 0, 2).reshape(width, -1)  # (shift, R*W)
    flat_a = a.reshape(-1)
    if metric == EUCLIDEAN:
        diff = shifted - flat_a[None, :]
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))
    ca = flat_a - flat_a.mean()
    cb = shifted - b.mean()
    denom = np.sqrt(np.dot(ca, ca) * np.dot(cb[0], cb[0]))
    r = cb @ ca / denom
    return np.clip(1.0 - r, 0.0, 2.0)
