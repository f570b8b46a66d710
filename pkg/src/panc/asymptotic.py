"""High-SNR approximations of channel-averaged Q-functions and pairwise
error probabilities, and empirical diversity-slope fitting."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .special_functions import q1

_LEADING = {1: 1.0 / 4.0, 2: 3.0 / 16.0, 3: 5.0 / 32.0}


class InsufficientData(ValueError):
    """Too few resolvable points to fit a slope."""


@dataclass(frozen=True)
class PepApprox:
    """Sum of ``coef * rho ** -order`` terms."""

    terms: tuple

    def __call__(self, rho):
        return sum(c * rho ** -k for c, k in self.terms)

    @property
    def diversity(self):
        return min(k for c, k in self.terms if c != 0.0)

    def leading_coefficient(self):
        d = self.diversity
        return sum(c for c, k in self.terms if k == d)


def q_channel_average(order, gammas, rho=None):
    """Leading coefficient of E[Q(sqrt(2 rho sum |h_k|^2))] over independent
    Rayleigh links with mean powers ``gammas``; with ``rho`` the approximate
    value ``coef * rho ** -order``."""
    g = np.atleast_1d(np.asarray(gammas, dtype=float))
    if order not in _LEADING or g.size != order:
        raise ValueError("order must be 1, 2 or 3 with one gamma per link")
    if np.any(g <= 0):
        raise ValueError("gammas must be positive")
    coef = _LEADING[order] / float(np.prod(g))
    return coef if rho is None else coef * rho ** -order


def q_channel_average_exact(gammas, rho):
    """(1/pi) int_0^{pi/2} prod_k (1 + rho gamma_k / sin^2 t)^-1 dt."""
    g = np.atleast_1d(np.asarray(gammas, dtype=float))

    def f(t):
        s2 = math.sin(t) ** 2
        return float(np.prod(s2 / (s2 + rho * g)))

    val, _ = integrate.quad(f, 0.0, 0.5 * math.pi, epsabs=1e-15, epsrel=1e-10, limit=200)
    return val / math.pi


def q_channel_average_mc(gammas, rho, n, rng, importance=True):
    """Sample mean of Q(sqrt(2 rho sum |h_k|^2)) with |h_k|^2 ~ Exp(gamma_k).

    Plain sampling almost never visits the deep fades that carry the mass
    at high SNR, so by default each gain is drawn from Exp(2 / rho) and
    reweighted by the likelihood ratio (unbiased, finite variance).
    """
    g = np.atleast_1d(np.asarray(gammas, dtype=float))
    tot = np.zeros(n)
    logw = np.zeros(n)
    for gk in g:
        if importance:
            m = min(2.0 / rho, gk)
            x = rng.exponential(m, size=n)
            logw += math.log(m / gk) + x * (1.0 / m - 1.0 / gk)
        else:
            x = rng.exponential(gk, size=n)
        tot += x
    return float(np.mean(q1(np.sqrt(2.0 * rho * tot)) * np.exp(logw)))


def _g(gammas):
    g = {k: float(gammas[k]) for k in ("1r", "2r", "1d", "2d", "rd")}
    g["sr"] = g["1r"] + g["2r"]
    return g


def pep_panc_unscaled(pair_from, pair_to, gammas, a=1.0, b=1.0, rho=None):
    """Printed high-SNR PEP expansions of PANC without power scaling.

    Available for T1 -> T4 and T1 -> T2 (0-based ``(0, 3)`` and ``(0, 1)``);
    the T1 -> T2 branch follows the ordering of ``a`` and ``b``.
    """
    g = _g(gammas)
    if (pair_from, pair_to) == (0, 3):
        share = g["rd"] / (g["1d"] + g["2d"] + g["rd"])
        terms = ((5.0 / (32 * g["1d"] * g["2d"] * g["rd"]), 3),
                 (5.0 / (128 * g["1d"] * g["2d"] * g["rd"] * g["1r"]), 4),
                 (share / (4 * g["2r"]), 1),
                 (share / (4 * g["sr"]), 1))
    elif (pair_from, pair_to) == (0, 1):
        base = ((3.0 / (16 * g["1d"] * g["rd"]), 2), (1.0 / (4 * g["1r"]), 1))
        if a > b:
            extra = ((1.0 / (4 * g["2r"]), 1), (1.0 / (4 * g["sr"]), 1))
        elif a < b:
            extra = ((3.0 / (64 * g["1d"] * g["rd"] * g["2r"]), 3), (3.0 / (64 * g["1d"] * g["rd"] * g["sr"]), 3))
        else:
            extra = ((1.0 / (16 * g["1d"] * g["2r"]), 2), (1.0 / (16 * g["1d"] * g["sr"]), 2))
        terms = base + extra
    else:
        raise NotImplementedError("only T1->T4 and T1->T2 have printed expansions")
    approx = PepApprox(terms)
    return approx if rho is None else approx(rho)


def pep_cxnc(scaled, gammas, transition=(0, 3), rho=None):
    """Printed high-SNR PEPs of XOR network coding.

    Unscaled: T1 -> T4 and T1 -> T2.  Scaled: the single-error event of
    source 1 (``(0, 1)``) or source 2 (``(0, 2)``).
    """
    g = _g(gammas)
    gsd = g["1d"] + g["2d"]
    if scaled:
        if transition == (0, 1):
            terms = ((1.0 / (4 * g["1d"]), 1),)
        elif transition == (0, 2):
            terms = ((1.0 / (4 * g["2d"]), 1),)
        else:
            raise NotImplementedError("scaled CXNC expansion covers single errors only")
    elif transition == (0, 3):
        terms = ((5.0 / (32 * gsd * g["rd"] * g["1r"]), 3), (5.0 / (32 * gsd * g["rd"] * g["2r"]), 3),
                 (1.0 / (4 * gsd), 1))
    elif transition == (0, 1):
        terms = ((3.0 / (16 * g["1d"] * g["1r"]), 2), (3.0 / (16 * g["1d"] * g["2r"]), 2),
                 (3.0 / (16 * g["1d"] * g["rd"]), 2))
    else:
        raise NotImplementedError("only T1->T4 and T1->T2 have printed expansions")
    approx = PepApprox(terms)
    return approx if rho is None else approx(rho)


def gamma_srd_mean(g1r, g2r, grd):
    """Mean of min of three independent exponentials: the harmonic sum."""
    return g1r * g2r * grd / (g1r * g2r + g1r * grd + g2r * grd)


@dataclass(frozen=True)
class DiversityFit:
    scheme: str
    window: tuple
    slope: float
    residual: float
    points: int


def fit_slope(snr_db, sper):
    """Least-squares slope of log10(sper) against -snr_db / 10."""
    x = -np.asarray(snr_db, dtype=float) / 10.0
    y = np.log10(np.asarray(sper, dtype=float))
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    resid = float(math.sqrt(res[0] / len(x))) if len(res) else 0.0
    return float(coef[0]), resid


def diversity_slope(results, scheme, window=(20.0, 30.0), floor_factor=10.0):
    """Fit the diversity slope of ``scheme`` over ``window`` (dB, inclusive),
    ignoring points within ``floor_factor`` of the MC resolution 1/N."""
    lo, hi = window
    if hi - lo < 10.0:
        raise ValueError("diversity window must span at least 10 dB")
    pts = [(r.snr_db, r.sper_mc) for r in results
           if r.scheme == scheme and lo <= r.snr_db <= hi and r.sper_mc > floor_factor / r.trials]
    if len(pts) < 3:
        raise InsufficientData(f"{scheme}: {len(pts)} resolvable points in {window}")
    snr, sper = zip(*pts)
    slope, resid = fit_slope(snr, sper)
    return DiversityFit(scheme, (lo, hi), slope, resid, len(pts))
