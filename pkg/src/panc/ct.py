"""Coordinate transformation of the parallelogram constellations into
origin-centred rectangles, the cone decision regions that go with it and
the resulting approximate SPER.

Both constellations have the form ``V_i = x1 * f1 + x2 * f2`` for two
half-edge vectors ``f1``, ``f2``.  Mapping ``f1`` and ``f2`` onto scaled
unit axes turns the parallelogram into an axis-aligned rectangle with the
same side lengths; the noise then becomes correlated with precision
matrix ``B`` and a rotation ``Q`` from the eigen-decomposition of ``B``
decorrelates it.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .exact import RelayLevelDistribution, displaced_mean
from .geometry import (PAIRS, ChannelRealization, Constellation, DegenerateConstellation, PowerPair,
                       DEGENERATE_EPS, build_irc)
from .regions import ConvexRegion
from .special_functions import GaussianSpec, eigen_2x2, gaussian_region_prob

log = logging.getLogger(__name__)

_S = math.sqrt(0.5)
# the four 45-degree cones, keyed by the sign pattern (Re - Im, Re + Im)
CONES = {
    (1, -1): ConvexRegion([[-1.0, 1.0], [1.0, 1.0]], [0.0, 0.0]),
    (1, 1): ConvexRegion([[-1.0, 1.0], [-1.0, -1.0]], [0.0, 0.0]),
    (-1, 1): ConvexRegion([[1.0, -1.0], [-1.0, -1.0]], [0.0, 0.0]),
    (-1, -1): ConvexRegion([[1.0, -1.0], [1.0, 1.0]], [0.0, 0.0]),
}


@dataclass
class CtTransform:
    """``C = Q @ A_inv`` together with the pieces it is built from.

    ``vertices`` are the transformed constellation points and ``cells[i]``
    the cone that decides for point ``i``.  ``noise_cov`` is the transformed
    noise covariance, ``diag(1 / lam)``.
    """

    a_inv: np.ndarray
    b: np.ndarray
    q: np.ndarray
    c: np.ndarray
    lam: np.ndarray
    vertices: np.ndarray
    cells: list
    noise_cov: np.ndarray

    def apply(self, z):
        return np.asarray(z, dtype=float) @ self.c.T


def _cone_of(z):
    u, v = z[0] - z[1], z[0] + z[1]
    return (1 if u > 0 else -1, 1 if v > 0 else -1)


def ct_from_half_edges(f1, f2, var_per_dim) -> CtTransform:
    """Transform for the constellation ``x1 * f1 + x2 * f2`` under isotropic
    noise of variance ``var_per_dim`` per dimension."""
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    n1, n2 = np.linalg.norm(f1), np.linalg.norm(f2)
    cross = f1[0] * f2[1] - f1[1] * f2[0]
    if n1 == 0.0 or n2 == 0.0 or abs(cross) <= DEGENERATE_EPS * n1 * n2:
        raise DegenerateConstellation("half-edge vectors are collinear")
    a = np.column_stack([f1 / n1, f2 / n2])
    a_inv = np.linalg.inv(a)
    b = a.T @ a / var_per_dim
    lam, q = eigen_2x2(b)
    if abs(b[0, 1]) <= 1e-15 * abs(b[0, 0]):
        # already uncorrelated: any rotation diagonalizes, take 45 degrees so
        # the rectangle axes land on the cone boundaries
        q = np.array([[_S, _S], [-_S, _S]])
    c = q @ a_inv
    verts = np.array([(x1 * f1 + x2 * f2) @ c.T for x1, x2 in PAIRS])
    if verts[0, 1] < 0:
        q, c, verts = -q, -c, -verts
    cov = c @ (var_per_dim * np.eye(2)) @ c.T
    cov = 0.5 * (cov + cov.T)
    cells = [CONES[_cone_of(v)] for v in verts]
    if len({id(x) for x in cells}) != 4:
        raise DegenerateConstellation("transformed points do not occupy four cones")
    return CtTransform(a_inv, b, q, c, lam, verts, cells, cov)


def ct_relay(ch: ChannelRealization) -> CtTransform:
    if abs(ch.beta) <= DEGENERATE_EPS:
        raise DegenerateConstellation(f"collinear relay channels (beta={ch.beta:.3e})")
    s1 = math.sqrt(ch.e1) * ch.h1r
    s2 = math.sqrt(ch.e2) * ch.h2r
    return ct_from_half_edges([s1.real, s1.imag], [s2.real, s2.imag], 0.5 * ch.sigma2)


def ct_dest(ch: ChannelRealization, p: PowerPair) -> CtTransform:
    g = math.sqrt(p.alpha) * ch.hrd
    f1 = [math.sqrt(ch.e1) * ch.h1d, 0.5 * (p.a - p.b) * g]
    f2 = [math.sqrt(ch.e2) * ch.h2d, 0.5 * (p.a + p.b) * g]
    return ct_from_half_edges(f1, f2, ch.sigma2)


# printed closed forms, kept for comparison against the numerical products

def a_relay_printed(ch: ChannelRealization):
    h1, h2 = ch.h1r, ch.h2r
    return (2.0 / ch.beta) * np.array([[abs(h1) * h2.imag, -abs(h1) * h2.real],
                                       [-abs(h2) * h1.imag, abs(h2) * h1.real]])


def b_relay_printed(ch: ChannelRealization):
    h1, h2 = ch.h1r, ch.h2r
    m11 = abs(h1) ** 2 * h2.imag ** 2 + abs(h2) ** 2 * h1.imag ** 2
    m12 = -abs(h1) ** 2 * h2.real * h2.imag - abs(h2) ** 2 * h1.real * h1.imag
    m22 = abs(h1) ** 2 * h2.real ** 2 + abs(h2) ** 2 * h1.real ** 2
    return 4.0 / (ch.beta * ch.sigma2) * np.array([[m11, m12], [m12, m22]])


def b_relay_numeric(ch: ChannelRealization):
    """``A^T Sigma^-1 A`` with the printed ``A`` and ``Sigma = sigma^2/2 I``."""
    a = a_relay_printed(ch)
    return a.T @ a * (2.0 / ch.sigma2)


def b_dest_printed(ch: ChannelRealization, p: PowerPair):
    h, h1, h2 = ch.hrd, ch.h1d, ch.h2d
    a, b = p.a, p.b
    beta_d = h * (h1 * (a + b) + h2 * (b - a))
    d1 = math.sqrt(4 * h1 ** 2 + (a - b) ** 2 * h ** 2)
    d2 = math.sqrt(4 * h2 ** 2 + (a + b) ** 2 * h ** 2)
    m11 = d1 ** 2 * (a + b) ** 2 * h ** 2 + 4 * d1 ** 2 * h2 ** 2
    m12 = d1 * d2 * (b ** 2 - a ** 2) * h ** 2 - 4 * d1 * d2 * h1 * h2
    m22 = d2 ** 2 * (b - a) ** 2 * h ** 2 + 4 * d2 ** 2 * h2 ** 2
    return 2.0 / (beta_d ** 2 * ch.sigma2) * np.array([[m11, m12], [m12, m22]])


def b_dest_numeric(ch: ChannelRealization, p: PowerPair):
    return ct_dest(ch, p).b


def eigenvalues_printed(b):
    """Eigenvalues of a symmetric 2x2 matrix in the expanded-radicand form."""
    b11, b12, b22 = b[0, 0], b[0, 1], b[1, 1]
    root = math.sqrt(max(b11 ** 2 + b22 ** 2 + 4 * b12 ** 2 - 2 * b11 * b22, 0.0))
    return np.array([(b11 + b22 + root) / 2.0, (b11 + b22 - root) / 2.0])


def _cone_prob(mean, cov, cell):
    return gaussian_region_prob(GaussianSpec(mean, cov), cell)


def ct_level_probs(t: CtTransform, irc: Constellation | None = None, sigma2=None,
                   pairs=(0, 1)) -> RelayLevelDistribution:
    """Relay decision probabilities under the cone detector.

    ``irc`` and ``sigma2`` are accepted for interface symmetry; everything
    needed is already in the transform.
    """
    probs = np.full((4, 4), np.nan)
    for i in pairs:
        for k in range(4):
            probs[i, k] = _cone_prob(t.vertices[i], t.noise_cov, t.cells[k])
    return RelayLevelDistribution(probs, 0 if irc is None else irc.case_tag)


def sper_ct(ch: ChannelRealization, p: PowerPair, genie=False, full_output=False):
    """SPER with both hops detected by the cone rule after transformation."""
    tr = ct_relay(ch)
    td = ct_dest(ch, p)
    relay = RelayLevelDistribution(np.eye(4)) if genie else ct_level_probs(tr)
    dest = np.full((4, 4), np.nan)
    per_pair = []
    for i in (0, 1):
        row = 0.0
        for k in range(4):
            w = relay.probs[i, k]
            if genie and w == 0.0:
                continue
            mean = td.apply(displaced_mean(ch, p, i, k))
            dest[i, k] = 1.0 - _cone_prob(mean, td.noise_cov, td.cells[i])
            row += w * dest[i, k]
        per_pair.append(row)
    total = 0.5 * sum(per_pair)
    if full_output:
        return total, {"relay": relay, "dest": dest}
    return total
