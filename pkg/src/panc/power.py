"""Relay power scaling factor and Max-min selection of the relay levels."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .geometry import ChannelRealization, PowerPair
from .special_functions import q1

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinkSnrs:
    gamma_sr: float
    gamma_rd: float
    mode: str = "instantaneous"

    def __post_init__(self):
        if self.gamma_sr < 0 or self.gamma_rd < 0:
            raise ValueError("link SNRs must be non-negative")
        if self.mode not in ("instantaneous", "statistical"):
            raise ValueError(f"unknown mode {self.mode!r}")


def gamma_sr(ch: ChannelRealization):
    """SNR of the weakest of the three relay-side pair distances (per unit noise)."""
    s1 = math.sqrt(ch.e1) * ch.h1r
    s2 = math.sqrt(ch.e2) * ch.h2r
    return min(abs(s1) ** 2, abs(s2) ** 2, abs(s1 + s2) ** 2)


def link_snrs(ch: ChannelRealization, er_ave=1.0, mode="instantaneous", gamma_rd_bar=None) -> LinkSnrs:
    if mode == "statistical":
        if gamma_rd_bar is None:
            raise ValueError("statistical mode needs gamma_rd_bar")
        grd = er_ave * gamma_rd_bar
    else:
        grd = er_ave * ch.hrd ** 2
    return LinkSnrs(gamma_sr(ch), grd, mode)


def scaling_factor(s: LinkSnrs) -> float:
    """alpha = min(gamma_SR / gamma_RD, 1); a silent relay (0) when gamma_RD = 0."""
    if s.gamma_rd == 0.0:
        log.info("gamma_RD = 0, relay silenced")
        return 0.0
    return min(s.gamma_sr / s.gamma_rd, 1.0)


def mac_upper_bound(ch: ChannelRealization, sigma2=None):
    """Union bound on the relay pair error for T1 (and T4) and its
    single-term min-SNR approximation, returned as ``(bound, approx)``."""
    sigma2 = ch.sigma2 if sigma2 is None else sigma2
    s1 = math.sqrt(ch.e1) * ch.h1r
    s2 = math.sqrt(ch.e2) * ch.h2r
    terms = [abs(s1) ** 2, abs(s2) ** 2, abs(s1 + s2) ** 2]
    bound = sum(q1(math.sqrt(2.0 * t / sigma2)) for t in terms)
    approx = q1(math.sqrt(2.0 * min(terms) / sigma2))
    return bound, approx


def squared_distances(ch: ChannelRealization, a, b):
    """The two edges and two diagonals of the destination constellation
    (alpha = 1), as arrays broadcast over ``a`` and ``b``."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    u1 = math.sqrt(ch.e1) * ch.h1d
    u2 = math.sqrt(ch.e2) * ch.h2d
    h2 = ch.hrd ** 2
    e12 = 4.0 * u1 ** 2 + h2 * (a - b) ** 2
    e13 = 4.0 * u2 ** 2 + h2 * (a + b) ** 2
    c1 = (2.0 * u2 - 2.0 * u1) ** 2
    c2 = (2.0 * u1 + 2.0 * u2) ** 2
    d23 = c1 + 4.0 * h2 * b ** 2
    d14 = c2 + 4.0 * h2 * a ** 2
    return e12, e13, d23, d14


def objective_exact_minpair(ch, a, b):
    return np.minimum.reduce(squared_distances(ch, a, b))


def objective_ct_minedge(ch, a, b):
    e12, e13, _, _ = squared_distances(ch, a, b)
    return np.minimum(e12, e13)


OBJECTIVES = {"exact_minpair": objective_exact_minpair, "ct_minedge": objective_ct_minedge}


def optimize_powers_exact(ch: ChannelRealization, er_ave=1.0, full_output=False):
    """Closed-form levels that equalize the two diagonals under the budget."""
    info = {"clamped": False, "hrd_zero": False}
    e = er_ave
    h2 = ch.hrd ** 2
    if h2 == 0.0:
        info["hrd_zero"] = True
        pp = PowerPair(math.sqrt(e), math.sqrt(e), 1.0, er_ave)
        return (pp, info) if full_output else pp
    u1 = math.sqrt(ch.e1) * ch.h1d
    u2 = math.sqrt(ch.e2) * ch.h2d
    c1 = (2.0 * u2 - 2.0 * u1) ** 2
    c2 = (2.0 * u1 + 2.0 * u2) ** 2
    ra = e + (c1 - c2) / (8.0 * h2)
    rb = e + (c2 - c1) / (8.0 * h2)
    if ra < 0.0:
        info["clamped"] = True
        a, b = 0.0, math.sqrt(2.0 * e)
    elif rb < 0.0:
        info["clamped"] = True
        a, b = math.sqrt(2.0 * e), 0.0
    else:
        a, b = math.sqrt(ra), math.sqrt(rb)
    pp = PowerPair(a, b, 1.0, er_ave)
    return (pp, info) if full_output else pp


def optimize_powers_ct(ch: ChannelRealization, er_ave=1.0, full_output=False):
    """Closed-form levels that equalize the two rectangle edges.

    Equal edges need ``a * b = (E1 |h1D|^2 - E2 |h2D|^2) / |hRD|^2``; when that
    exceeds the budget's reach (a negative radicand) the nearest feasible
    product ``+-E`` is used, i.e. ``a = |b| = sqrt(E)``.
    """
    info = {"clamped": False, "hrd_zero": False}
    e = er_ave
    h2 = ch.hrd ** 2
    if h2 == 0.0:
        info["hrd_zero"] = True
        pp = PowerPair(math.sqrt(e), math.sqrt(e), 1.0, er_ave)
        return (pp, info) if full_output else pp
    g1 = ch.e1 * ch.h1d ** 2
    g2 = ch.e2 * ch.h2d ** 2
    rp = 2.0 * (e * h2 + g2 - g1) / h2
    rr = 2.0 * (e * h2 + g1 - g2) / h2
    if rp < 0.0:
        info["clamped"] = True
        a, b = math.sqrt(e), math.sqrt(e)
    elif rr < 0.0:
        info["clamped"] = True
        a, b = math.sqrt(e), -math.sqrt(e)
    else:
        sp, sr = math.sqrt(rp), math.sqrt(rr)
        a, b = 0.5 * (sp + sr), 0.5 * (sr - sp)
        # the two radicals satisfy a^2 + b^2 = 2E exactly; trim rounding
        scale = math.sqrt(2.0 * e / (a * a + b * b))
        if scale < 1.0:
            a, b = a * scale, b * scale
    pp = PowerPair(a, b, 1.0, er_ave)
    return (pp, info) if full_output else pp


def grid_oracle(ch: ChannelRealization, er_ave=1.0, objective="exact_minpair", resolution=512):
    """Brute-force Max-min over ``a >= 0`` and signed ``b`` inside the budget.

    The budget circle is sampled at ``resolution`` angles and the best
    sample is polished by a bounded scalar search between its neighbours;
    an interior ``resolution x resolution`` grid is scanned as well.
    Returns ``(PowerPair, objective value)``.
    """
    if resolution < 256:
        raise ValueError("resolution must be at least 256")
    f = OBJECTIVES[objective]
    r = math.sqrt(2.0 * er_ave)
    theta = np.linspace(-0.5 * math.pi, 0.5 * math.pi, resolution)
    vals = f(ch, r * np.cos(theta), r * np.sin(theta))
    k = int(np.argmax(vals))
    best_v, best_ab = float(vals[k]), (r * math.cos(theta[k]), r * math.sin(theta[k]))
    lo = theta[max(k - 1, 0)]
    hi = theta[min(k + 1, resolution - 1)]
    res = minimize_scalar(lambda t: -float(f(ch, r * math.cos(t), r * math.sin(t))),
                          bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    if -res.fun > best_v:
        best_v, best_ab = -res.fun, (r * math.cos(res.x), r * math.sin(res.x))

    aa, bb = np.meshgrid(np.linspace(0.0, r, resolution), np.linspace(-r, r, resolution))
    inside = aa ** 2 + bb ** 2 <= 2.0 * er_ave
    ivals = np.where(inside, f(ch, aa, bb), -np.inf)
    j = np.unravel_index(int(np.argmax(ivals)), ivals.shape)
    if ivals[j] > best_v:
        best_v, best_ab = float(ivals[j]), (float(aa[j]), float(bb[j]))
    a, b = best_ab
    return PowerPair(max(a, 0.0), b, 1.0, er_ave), best_v


def baseline_powers(mode, er_ave, rng):
    """``a ~ U[0, sqrt(2E)]`` and ``b = sqrt(2E - a^2)``.

    ``mode`` is ``"random"`` or ``"fixed"``; the draw is the same, the caller
    decides whether it is redrawn per channel or kept for the whole run.
    """
    if mode not in ("random", "fixed"):
        raise ValueError(f"unknown baseline mode {mode!r}")
    a = float(rng.uniform(0.0, math.sqrt(2.0 * er_ave)))
    b = math.sqrt(max(2.0 * er_ave - a * a, 0.0))
    return PowerPair(a, b, 1.0, er_ave)
