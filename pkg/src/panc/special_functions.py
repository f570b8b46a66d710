"""Craig-form Q-functions, a bivariate Gaussian region oracle and a 2x2
symmetric eigen-solver."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import erfc, ndtr

from .regions import ConvexRegion

_QUAD_OPTS = dict(epsabs=1e-15, epsrel=1e-12, limit=200)


def q1(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x).

    Evaluated through ``erfc``; accepts scalars or arrays.
    """
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise ValueError("q1 requires finite input")
    out = 0.5 * erfc(xa / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


def craig_sector(x, upper):
    """(1/pi) * integral_0^upper exp(-x^2 / (2 sin^2 t)) dt, for x >= 0.

    This is the common kernel of the Craig forms of Q1 and Q2; ``upper`` may
    be anywhere in [0, pi].
    """
    if upper <= 0.0:
        return 0.0
    if x == 0.0:
        return upper / math.pi
    h = 0.5 * x * x

    def f(t):
        s = math.sin(t)
        if s == 0.0:
            return 0.0
        return math.exp(-h / (s * s))

    val, _ = integrate.quad(f, 0.0, upper, **_QUAD_OPTS)
    return val / math.pi


def craig_q1(x):
    """Q1 via Craig's integral; kept as an independent check on ``q1``."""
    if not math.isfinite(x):
        raise ValueError("craig_q1 requires finite input")
    if x < 0:
        return 1.0 - craig_sector(-x, math.pi / 2)
    return craig_sector(x, math.pi / 2)


def q2(x, rho):
    """Q2(x; rho): (1/pi) * integral_0^{arctan sqrt((1+rho)/(1-rho))}
    exp(-x^2/(2 sin^2 phi)) dphi.

    Parameters
    ----------
    x : float
        Non-negative argument.
    rho : float
        Correlation in the open interval (-1, 1).
    """
    if not (math.isfinite(x) and math.isfinite(rho)):
        raise ValueError("q2 requires finite input")
    if abs(rho) >= 1.0:
        raise ValueError(f"q2 needs |rho| < 1, got {rho}")
    if x < 0.0:
        raise ValueError(f"q2 needs x >= 0, got {x}")
    upper = math.atan(math.sqrt((1.0 + rho) / (1.0 - rho)))
    return craig_sector(x, upper)


@dataclass(frozen=True)
class GaussianSpec:
    """Bivariate normal with a given mean and covariance."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(2)
        cov = np.asarray(self.cov, dtype=float).reshape(2, 2)
        if abs(cov[0, 1] - cov[1, 0]) > 1e-12 * max(1.0, np.abs(cov).max()):
            raise ValueError("covariance must be symmetric")
        cov = 0.5 * (cov + cov.T)
        if cov[0, 0] <= 0 or np.linalg.det(cov) <= 0:
            raise ValueError("covariance must be positive definite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def isotropic(cls, mean, var_per_dim):
        return cls(mean, var_per_dim * np.eye(2))

    @property
    def is_isotropic(self):
        c = self.cov
        return abs(c[0, 1]) <= 1e-15 * c[0, 0] and abs(c[0, 0] - c[1, 1]) <= 1e-12 * c[0, 0]


def _ndtr_diff(lo, hi):
    """Phi(hi) - Phi(lo) without cancellation in the upper tail."""
    if lo >= hi:
        return 0.0
    if lo > 0.0:
        return ndtr(-lo) - ndtr(-hi)
    return ndtr(hi) - ndtr(lo)


def _whitening_rotation(cov, normals):
    """``R @ L^-1`` with ``L L^T = cov`` and ``R`` the rotation that keeps
    the transformed boundary normals furthest from horizontal."""
    w = np.linalg.inv(np.linalg.cholesky(cov))
    if normals.shape[0] == 0:
        return w
    n = normals @ np.linalg.inv(w)
    ang = np.arctan2(n[:, 1], n[:, 0])
    cand = np.linspace(0.0, math.pi, 90, endpoint=False)
    # |sin| of each normal's angle after rotating by t
    score = np.abs(np.sin(ang[None, :] + cand[:, None])).min(axis=1)
    t = cand[int(np.argmax(score))]
    rot = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
    return rot @ w


def gaussian_region_prob(g: GaussianSpec, region: ConvexRegion, full_output=False):
    """Probability mass of ``g`` over a convex polygonal region.

    The outer integral over the first coordinate is done by adaptive
    quadrature on [mean - 10 sd, mean + 10 sd], split at every vertex
    abscissa; the inner integral uses the exact conditional normal CDF.

    With ``full_output=True`` returns ``(prob, info)`` where ``info`` has a
    ``degenerate`` flag and the accumulated quadrature error estimate.
    """
    info = {"degenerate": False, "abserr": 0.0}
    if region.is_degenerate():
        info["degenerate"] = True
        return (0.0, info) if full_output else 0.0

    # whiten, then rotate so that no boundary is close to vertical: the
    # outer quadrature cannot resolve a near-step in the integrand
    w = _whitening_rotation(g.cov, region.normals)
    region = region.transformed(w, -(w @ g.mean))
    g = GaussianSpec.isotropic([0.0, 0.0], 1.0)

    mx, my = g.mean
    sxx, sxy, syy = g.cov[0, 0], g.cov[0, 1], g.cov[1, 1]
    sx = math.sqrt(sxx)
    slope = sxy / sxx
    s_cond = math.sqrt(syy - sxy * sxy / sxx)

    xlo, xhi = mx - 10.0 * sx, mx + 10.0 * sx
    n, c = region.normals, region.offsets
    upper_rows, lower_rows = [], []
    for (nx, ny), ci in zip(n, c):
        if abs(ny) < 1e-15:
            if nx > 0:
                xhi = min(xhi, ci / nx)
            else:
                xlo = max(xlo, ci / nx)
        elif ny > 0:
            upper_rows.append((nx / ny, ci / ny))
        else:
            lower_rows.append((nx / ny, ci / ny))
    if xlo >= xhi:
        return (0.0, info) if full_output else 0.0

    # breakpoints: abscissae where two boundary lines cross
    brk = set()
    k = len(n)
    for i in range(k):
        for j in range(i + 1, k):
            det = n[i, 0] * n[j, 1] - n[i, 1] * n[j, 0]
            if abs(det) < 1e-15:
                continue
            x = (c[i] * n[j, 1] - c[j] * n[i, 1]) / det
            if xlo < x < xhi:
                brk.add(x)
    pts = [xlo] + sorted(brk) + [xhi]

    norm = 1.0 / (sx * math.sqrt(2.0 * math.pi))

    def integrand(x):
        hi = min((b - a * x for a, b in upper_rows), default=math.inf)
        lo = max((b - a * x for a, b in lower_rows), default=-math.inf)
        if lo >= hi:
            return 0.0
        m = my + slope * (x - mx)
        z = (x - mx) / sx
        return norm * math.exp(-0.5 * z * z) * _ndtr_diff((lo - m) / s_cond, (hi - m) / s_cond)

    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a <= 0:
            continue
        val, err = integrate.quad(integrand, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)
        total += val
        info["abserr"] += err
    total = min(max(total, 0.0), 1.0)
    return (total, info) if full_output else total


def eigen_2x2(m):
    """Eigen-decomposition of a symmetric 2x2 matrix.

    Returns ``(lam, Q)`` with ``lam[0] >= lam[1]`` and ``Q`` a rotation
    (det +1) whose rows are the matching unit eigenvectors, so that
    ``m == Q.T @ diag(lam) @ Q``.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (2, 2) or not np.all(np.isfinite(m)):
        raise ValueError("expected a finite 2x2 matrix")
    scale = max(1.0, float(np.abs(m).max()))
    if abs(m[0, 1] - m[1, 0]) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    b11, b22 = m[0, 0], m[1, 1]
    b12 = 0.5 * (m[0, 1] + m[1, 0])
    # sqrt(b11^2 + b22^2 + 4 b12^2 - 2 b11 b22), written without cancellation
    root = math.hypot(b11 - b22, 2.0 * b12)
    lam = np.array([(b11 + b22 + root) / 2.0, (b11 + b22 - root) / 2.0])
    theta = 0.5 * math.atan2(2.0 * b12, b11 - b22)
    c, s = math.cos(theta), math.sin(theta)
    q = np.array([[c, s], [-s, c]])
    return lam, q
