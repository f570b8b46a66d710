"""Wedge probabilities of an isotropic bivariate Gaussian and the
decomposition of convex decision cells into signed wedge terms.

Angles follow one convention throughout: at a wedge vertex ``M`` the angle
``phi`` of a ray is measured from the extension of the line ``V -> M``
beyond ``M`` (``V`` is the Gaussian mean).  ``d`` is the squared distance
``|V - M|^2`` divided by twice the per-dimension noise variance, which is
``|V - M|^2 / sigma^2`` for complex noise of variance ``sigma^2 / 2`` per
dimension.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .regions import ConvexRegion
from .special_functions import GaussianSpec, craig_sector, gaussian_region_prob, q1, q2

log = logging.getLogger(__name__)

_PI = math.pi


class DecompositionMismatch(RuntimeError):
    """Wedge assembly disagrees with the quadrature oracle."""


def _clamp(val, name):
    if val < -1e-9 or val > 1.0 + 1e-9:
        log.debug("%s evaluated to %.3e before clamping", name, val)
    return min(max(val, 0.0), 1.0)


def _corr(phi):
    # (tan^2 phi - 1) / (tan^2 phi + 1), written so phi = pi/2 stays finite
    return -math.cos(2.0 * phi)


def _half_q2(d, phi):
    """Probability of the wedge between the extension of V->M and a ray at
    angle |phi| in [0, pi], i.e. (1/2) Q2(sqrt(2d) sin phi; corr(phi)) for
    |phi| <= pi/2, continued past pi/2 through the half-plane identity."""
    psi = abs(phi)
    if psi > _PI + 1e-12:
        raise ValueError(f"wedge angle {phi} outside [-pi, pi]")
    psi = min(psi, _PI)
    if psi == 0.0:
        return 0.0
    x = math.sqrt(2.0 * d) * math.sin(psi)
    if psi > 0.5 * _PI:
        return q1(x) - _half_q2(d, _PI - psi)
    rho = _corr(psi)
    if abs(rho) < 1.0:
        return 0.5 * q2(x, rho)
    # rho -> +1 at phi = pi/2 (upper limit pi/2); rho -> -1 only for phi -> 0
    return 0.5 * craig_sector(x, 0.5 * _PI if rho > 0 else 0.0)


def p_w1(d_ik, phi1, phi2, clamp=True):
    """Wedge with both rays on the same side of the V-M extension."""
    if phi1 * phi2 < 0:
        raise ValueError("p_w1 needs phi1 * phi2 >= 0")
    val = _half_q2(d_ik, phi2) - _half_q2(d_ik, phi1)
    return _clamp(val, "P_w1") if clamp else val


def p_w2(d_ik, phi1, phi2, clamp=True):
    """Wedge whose rays lie on opposite sides of the V-M extension.

    The two sides add: the extension splits the wedge into two same-side
    wedges that each start on the extension line.
    """
    if not phi1 * phi2 < 0:
        raise ValueError("p_w2 needs phi1 * phi2 < 0")
    val = _half_q2(d_ik, phi1) + _half_q2(d_ik, -phi2)
    return _clamp(val, "P_w2") if clamp else val


def p_w2_printed(d_ik, phi1, phi2):
    """The opposite-side wedge formula with the cross-paired correlation
    arguments and the minus sign exactly as typeset.  Kept for reporting;
    it does not match the quadrature oracle (see tests)."""
    if not phi1 * phi2 < 0:
        raise ValueError("p_w2 needs phi1 * phi2 < 0")
    t1, t2 = math.tan(phi1) ** 2, math.tan(phi2) ** 2
    r1 = (t1 - 1.0) / (t2 + 1.0)
    r2 = (t2 - 1.0) / (t1 + 1.0)
    s = math.sqrt(2.0 * d_ik)
    return 0.5 * (q2(s * abs(math.sin(phi1)), r1) - q2(s * math.sin(-phi2), r2))


_PROTOS = {1: p_w1, 2: p_w2}


def p_w3(d_ij, d_ik, phi1, phi2, phi3, phi4, m=1, n=1, clamp=True):
    """Difference of two wedges: P_wm(d_ij, phi1, phi2) - P_wn(d_ik, phi3, phi4)."""
    if m not in _PROTOS or n not in _PROTOS:
        raise ValueError("m and n must be 1 or 2")
    val = _PROTOS[m](d_ij, phi1, phi2, clamp=False) - _PROTOS[n](d_ik, phi3, phi4, clamp=False)
    return _clamp(val, "P_w3") if clamp else val


def _q2_printed(x, phi):
    rho = _corr(phi)
    if abs(rho) < 1.0:
        return q2(abs(x), rho)
    return craig_sector(abs(x), 0.5 * _PI if rho > 0 else 0.0)


def p_w4(d_ik, phi1, phi2, clamp=True):
    """Probability of landing inside a wedge that contains the mean, using
    the closed form with its additive constant as typeset.

    This does not reproduce the angular fraction at ``d = 0``; the oracle
    tests report the gap and :func:`p_w4_corrected` is used instead.
    """
    s = math.sqrt(2.0 * d_ik)
    acc = 0.0
    for phi in (phi1, phi2):
        x = s * math.sin(phi)
        acc += _q2_printed(x, phi) - _PI * q1(x)
    val = acc / (2.0 * _PI) + (phi1 + phi2 + 2.0) / (2.0 * _PI)
    return _clamp(val, "P_w4") if clamp else val


def p_w4_corrected(d_ik, phi1, phi2, clamp=True):
    """Inside-wedge probability: 1 - sum over both sides of the mass beyond
    that side.  ``phi_n`` in (0, pi) is the angle at the wedge vertex between
    the direction to the mean and side ``n``."""
    s = math.sqrt(2.0 * d_ik)
    val = 1.0
    for phi in (phi1, phi2):
        val += _half_q2(d_ik, phi) - q1(s * math.sin(phi))
    return _clamp(val, "P_w4*") if clamp else val


def p_w5(d_ik, d_ij, phi1, phi2, phi3, phi4, clamp=True):
    """Inside probability for a segment-plus-two-rays cell, as typeset.

    Only reported against the oracle; the SPER pipeline assembles such
    cells from edge terms instead.
    """
    sj = math.sqrt(2.0 * d_ij)
    sk = math.sqrt(2.0 * d_ik)
    acc = 0.0
    for phi in (phi1, phi2, phi3):
        acc += _q2_printed(sj * math.sin(phi), phi)
    for phi in (phi1, phi2):
        acc -= _PI * q1(sj * math.sin(phi))
    ang = phi3 + phi4
    acc -= _q2_printed(sk * math.sin(ang), ang)
    val = (acc + phi1 + phi2 + phi4 + 3.0) / (2.0 * _PI)
    return _clamp(val, "P_w5") if clamp else val


@dataclass(frozen=True)
class WedgeSpec:
    prototype: int
    d_ik: float
    phi1: float
    phi2: float
    d_ij: float = 0.0
    phi3: float = 0.0
    phi4: float = 0.0
    m: int = 1
    n: int = 1

    def evaluate(self):
        p = self.prototype
        if p == 1:
            return p_w1(self.d_ik, self.phi1, self.phi2)
        if p == 2:
            return p_w2(self.d_ik, self.phi1, self.phi2)
        if p == 3:
            return p_w3(self.d_ij, self.d_ik, self.phi1, self.phi2, self.phi3, self.phi4, self.m, self.n)
        if p == 4:
            return p_w4_corrected(self.d_ik, self.phi1, self.phi2)
        if p == 5:
            return p_w5(self.d_ik, self.d_ij, self.phi1, self.phi2, self.phi3, self.phi4)
        raise ValueError(f"unknown prototype {p}")


@dataclass
class Decomposition:
    """``constant + sum(sign * spec.evaluate())`` over ``terms``."""

    constant: float = 0.0
    terms: list = field(default_factory=list)

    def evaluate(self):
        val = self.constant + sum(sgn * spec.evaluate() for sgn, spec in self.terms)
        return min(max(val, 0.0), 1.0)


def _angle(a, b):
    """Unsigned angle in [0, pi] between vectors a and b."""
    return math.atan2(abs(a[0] * b[1] - a[1] * b[0]), a[0] * b[0] + a[1] * b[1])


def _local_fraction(mean, cell: ConvexRegion, tol):
    """Angular fraction of the cell seen from ``mean``: 1 inside, 0 outside,
    1/2 on an edge, (interior angle)/(2 pi) at a vertex."""
    slack = cell.slack(mean) if cell.normals.shape[0] else np.zeros(0)
    if np.any(slack > tol):
        return 0.0, slack
    active = np.flatnonzero(np.abs(slack) <= tol)
    if active.size == 0:
        return 1.0, slack
    if active.size == 1:
        return 0.5, slack
    # tangent cone of the active constraints
    normals = cell.normals[active]
    best = None
    for i in range(len(normals)):
        for j in range(i + 1, len(normals)):
            ang = _PI - _angle(normals[i], normals[j])
            best = ang if best is None else min(best, ang)
    return best / (2.0 * _PI), slack


def decompose_cell(mean, cell: ConvexRegion, var_per_dim: float) -> Decomposition:
    """Signed wedge decomposition of ``P(mean + noise in cell)`` for noise with
    variance ``var_per_dim`` in each of two independent dimensions.

    Each boundary piece contributes the mass lying beyond it inside the
    angular sector it subtends from the mean; pieces the mean sees from
    outside add, pieces it sees from inside subtract.
    """
    mean = np.asarray(mean, dtype=float)
    scale = 2.0 * var_per_dim
    tol = 1e-13 * (1.0 + float(np.abs(mean).max()) + (float(np.abs(cell.offsets).max()) if cell.offsets.size else 0.0))
    const, _ = _local_fraction(mean, cell, tol)
    out = Decomposition(constant=const)
    for e in cell.edges():
        slack = float(e.normal @ mean - e.offset)
        if abs(slack) <= tol:
            continue
        sign = 1.0 if slack > 0 else -1.0
        u = e.direction
        p, q = e.start, e.end
        if p is not None and q is not None:
            dp, dq = p - mean, q - mean
            spec = WedgeSpec(3, d_ij=float(dp @ dp) / scale, phi1=0.0, phi2=_angle(dp, u),
                             d_ik=float(dq @ dq) / scale, phi3=0.0, phi4=_angle(dq, u), m=1, n=1)
            out.terms.append((sign, spec))
        elif p is not None:
            dp = p - mean
            out.terms.append((sign, WedgeSpec(1, float(dp @ dp) / scale, 0.0, _angle(dp, u))))
        elif q is not None:
            dq = q - mean
            out.terms.append((sign, WedgeSpec(1, float(dq @ dq) / scale, 0.0, _angle(dq, -u))))
        else:
            # full line: two rays from the foot of the perpendicular
            d = slack * slack / scale
            half = WedgeSpec(1, d, 0.0, 0.5 * _PI)
            out.terms.append((sign, half))
            out.terms.append((sign, half))
    return out


def cell_probability(g: GaussianSpec, cell: ConvexRegion, decomposition: Decomposition | None = None,
                     check=False, tol=1e-7):
    """P(g in cell) from its wedge decomposition (isotropic ``g`` only).

    With ``check=True`` the result is compared to :func:`gaussian_region_prob`
    and a :class:`DecompositionMismatch` is raised beyond ``tol``.
    """
    if not g.is_isotropic:
        raise ValueError("wedge decomposition needs isotropic noise")
    if decomposition is None:
        decomposition = decompose_cell(g.mean, cell, g.cov[0, 0])
    val = decomposition.evaluate()
    if check:
        ref = gaussian_region_prob(g, cell)
        if abs(ref - val) > tol:
            raise DecompositionMismatch(f"wedge {val:.12g} vs oracle {ref:.12g}")
    return val
