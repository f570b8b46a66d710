"""Convex polygonal regions described as intersections of half-planes.

A region is ``{z : N @ z <= c}`` for a stack of outward normals ``N`` and
offsets ``c``.  The class also enumerates the boundary pieces (segments,
rays or full lines), which is what both the quadrature oracle and the
wedge decomposition need.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_TOL = 1e-12


@dataclass(frozen=True)
class Edge:
    """One boundary piece of a convex region.

    The piece is ``base + t * direction`` for ``t`` in ``[t0, t1]``; either
    bound may be infinite.  ``normal`` is the unit outward normal and
    ``offset`` the matching line offset (``normal @ z == offset``).
    """

    base: np.ndarray
    direction: np.ndarray
    t0: float
    t1: float
    normal: np.ndarray
    offset: float

    def point(self, t):
        return self.base + t * self.direction

    @property
    def start(self):
        return None if np.isinf(self.t0) else self.point(self.t0)

    @property
    def end(self):
        return None if np.isinf(self.t1) else self.point(self.t1)


@dataclass
class ConvexRegion:
    """Intersection of half-planes ``normals @ z <= offsets``."""

    normals: np.ndarray
    offsets: np.ndarray
    _edges: list | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        n = np.asarray(self.normals, dtype=float).reshape(-1, 2)
        c = np.asarray(self.offsets, dtype=float).reshape(-1)
        if n.shape[0] != c.shape[0]:
            raise ValueError("normals and offsets disagree in length")
        norms = np.hypot(n[:, 0], n[:, 1])
        if np.any(norms == 0):
            raise ValueError("zero normal vector")
        # store unit normals so distances and tolerances are in signal units
        self.normals = n / norms[:, None]
        self.offsets = c / norms

    @classmethod
    def plane(cls):
        return cls(np.zeros((0, 2)), np.zeros(0))

    @classmethod
    def closer_to(cls, p, others):
        """Points at least as close to ``p`` as to each point in ``others``."""
        p = np.asarray(p, dtype=float)
        rows, offs = [], []
        for q in others:
            q = np.asarray(q, dtype=float)
            # |z-p|^2 <= |z-q|^2  <=>  2 (q-p).z <= |q|^2 - |p|^2
            rows.append(2.0 * (q - p))
            offs.append(q @ q - p @ p)
        return cls(np.array(rows), np.array(offs))

    def intersect(self, other: "ConvexRegion") -> "ConvexRegion":
        return ConvexRegion(np.vstack([self.normals, other.normals]),
                            np.concatenate([self.offsets, other.offsets]))

    def transformed(self, mat, shift=None) -> "ConvexRegion":
        """Image of the region under ``z -> mat @ z + shift``."""
        mat = np.asarray(mat, dtype=float)
        inv = np.linalg.inv(mat)
        shift = np.zeros(2) if shift is None else np.asarray(shift, float)
        # n.z <= c with z = inv (w - shift)  ->  (n inv) w <= c + n inv shift
        n_new = self.normals @ inv
        return ConvexRegion(n_new, self.offsets + n_new @ shift)

    def contains(self, z, tol=0.0):
        z = np.asarray(z, dtype=float)
        if self.normals.shape[0] == 0:
            return np.ones(z.shape[:-1], dtype=bool) if z.ndim > 1 else True
        vals = z @ self.normals.T - self.offsets
        return np.all(vals <= tol, axis=-1)

    def slack(self, z):
        """Signed distances ``n.z - c`` of a point to every boundary line."""
        return self.normals @ np.asarray(z, dtype=float) - self.offsets

    def edges(self) -> list[Edge]:
        if self._edges is None:
            self._edges = self._compute_edges()
        return self._edges

    def _compute_edges(self):
        out = []
        k = self.normals.shape[0]
        seen = []
        for i in range(k):
            n_i, c_i = self.normals[i], self.offsets[i]
            if any(np.allclose(n_i, n_j, atol=1e-14) and abs(c_i - c_j) < 1e-14
                   for n_j, c_j in seen):
                continue
            seen.append((n_i, c_i))
            base = n_i * c_i
            u = np.array([-n_i[1], n_i[0]])
            lo, hi = -np.inf, np.inf
            empty = False
            for j in range(k):
                if j == i:
                    continue
                a = self.normals[j] @ u
                rhs = self.offsets[j] - self.normals[j] @ base
                if abs(a) < 1e-15:
                    if rhs < -_TOL:
                        empty = True
                        break
                    continue
                if a > 0:
                    hi = min(hi, rhs / a)
                else:
                    lo = max(lo, rhs / a)
            if empty or not hi - lo > _TOL:
                continue
            out.append(Edge(base, u, lo, hi, n_i.copy(), float(c_i)))
        return out

    def vertices(self):
        pts = []
        for e in self.edges():
            for p in (e.start, e.end):
                if p is not None and not any(np.allclose(p, q, atol=1e-12) for q in pts):
                    pts.append(p)
        return pts

    def is_degenerate(self) -> bool:
        """True when the region has empty interior."""
        k = self.normals.shape[0]
        if k == 0:
            return False
        from scipy.optimize import linprog

        # maximise the radius s of a ball inside the region (capped at 1)
        a_ub = np.hstack([self.normals, np.ones((k, 1))])
        res = linprog(c=[0.0, 0.0, -1.0], A_ub=a_ub, b_ub=self.offsets,
                      bounds=[(None, None), (None, None), (None, 1.0)],
                      method="highs")
        if res.status != 0:
            return True
        return -res.fun <= 1e-12
