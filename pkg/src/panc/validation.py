"""Oracle suites behind ``panc validate``.

Gating checks compare a closed form with an independent computation;
report-only checks print how far a printed formula is from its oracle.
"""
from __future__ import annotations

import math

import numpy as np

from .ct import b_relay_numeric, b_relay_printed, ct_dest, ct_relay
from .exact import sper_exact
from .geometry import ChannelRealization, PowerPair, build_irc, voronoi_cell
from .power import grid_oracle, objective_ct_minedge, objective_exact_minpair, optimize_powers_ct, \
    optimize_powers_exact
from .regions import ConvexRegion
from .special_functions import GaussianSpec, gaussian_region_prob
from .wedge import decompose_cell, p_w2, p_w2_printed, p_w4, p_w4_corrected


def random_channel(rng, sigma2=1.0):
    def cn():
        return complex(*rng.standard_normal(2)) / math.sqrt(2.0)
    while True:
        ch = ChannelRealization(cn(), cn(), abs(cn()), abs(cn()), abs(cn()), sigma2=sigma2)
        if abs(ch.beta) > 1e-3:
            return ch


def random_power(rng, er_ave=1.0):
    a = rng.uniform(0.0, math.sqrt(2.0 * er_ave))
    b = rng.choice([-1.0, 1.0]) * math.sqrt(2.0 * er_ave - a * a) * rng.uniform(0.2, 1.0)
    return PowerPair(a, b, float(rng.uniform(0.2, 1.0)), er_ave)


def check_wedge_cells(n, rng):
    """Voronoi cells of random four-point sets against quadrature."""
    worst = 0.0
    for _ in range(n):
        pts = rng.standard_normal((4, 2))
        k = int(rng.integers(4))
        cell = ConvexRegion.closer_to(pts[k], [pts[j] for j in range(4) if j != k])
        mean = rng.standard_normal(2) * 1.5
        var = float(rng.uniform(0.05, 2.0))
        val = decompose_cell(mean, cell, var).evaluate()
        ref = gaussian_region_prob(GaussianSpec.isotropic(mean, var), cell)
        worst = max(worst, abs(val - ref))
    return worst


def check_exact_relay(n, rng):
    worst = 0.0
    for _ in range(n):
        ch = random_channel(rng, float(10 ** rng.uniform(-2, 0.5)))
        br = sper_exact(ch, PowerPair(1.0, 1.0))
        irc = build_irc(ch)
        for i in (0, 1):
            for k in range(4):
                ref = gaussian_region_prob(GaussianSpec.isotropic(irc.vertices[i], 0.5 * ch.sigma2),
                                           voronoi_cell(irc, k))
                worst = max(worst, abs(ref - br.relay.probs[i, k]))
    return worst


def _rect_error(t, f1, f2):
    v = t.vertices
    sides = [np.linalg.norm(v[0] - v[1]) - 2 * np.linalg.norm(f1), np.linalg.norm(v[0] - v[2]) - 2 * np.linalg.norm(f2)]
    shape = [np.abs(v[0] + v[3]).max(), np.abs(v[1] + v[2]).max(), abs((v[0] - v[1]) @ (v[0] - v[2]))]
    return max(map(abs, sides)), max(shape)


def check_ct(n, rng):
    side = shape = 0.0
    for _ in range(n):
        ch = random_channel(rng)
        p = random_power(rng)
        tr = ct_relay(ch)
        s, r = _rect_error(tr, [ch.h1r.real, ch.h1r.imag], [ch.h2r.real, ch.h2r.imag])
        g = math.sqrt(p.alpha) * ch.hrd
        td = ct_dest(ch, p)
        s2, r2 = _rect_error(td, [ch.h1d, 0.5 * (p.a - p.b) * g], [ch.h2d, 0.5 * (p.a + p.b) * g])
        side, shape = max(side, s, s2), max(shape, r, r2)
    return side, shape


def check_optimizers(n, rng):
    r1, r2 = [], []
    for _ in range(n):
        ch = random_channel(rng)
        p1, p2 = optimize_powers_exact(ch), optimize_powers_ct(ch)
        r1.append(float(objective_exact_minpair(ch, p1.a, p1.b)) / grid_oracle(ch, objective="exact_minpair")[1])
        r2.append(float(objective_ct_minedge(ch, p2.a, p2.b)) / grid_oracle(ch, objective="ct_minedge")[1])
    return min(r1), min(r2)


def run_all(n=100, seed=0, out=print):
    rng = np.random.default_rng(seed)
    ok = True

    def gate(name, value, tol):
        nonlocal ok
        passed = value <= tol
        ok &= passed
        out(f"[{'PASS' if passed else 'FAIL'}] {name}: {value:.3e} (tol {tol:g})")

    gate("wedge decomposition vs quadrature", check_wedge_cells(n, rng), 1e-7)
    gate("relay level probabilities vs quadrature", check_exact_relay(max(n // 5, 1), rng), 1e-7)
    side, shape = check_ct(n, rng)
    gate("CT side-length preservation", side, 1e-9)
    gate("CT rectangle shape", shape, 1e-9)
    m1, m2 = check_optimizers(max(n // 5, 1), rng)
    gate("CT-edge levels vs grid oracle (1 - ratio)", 1.0 - m2, 1e-3)

    out("[INFO] origin-constellation levels vs grid oracle, worst ratio "
        f"{m1:.4f}")
    out(f"[INFO] opposite-side wedge, printed form {p_w2_printed(0.0, math.pi / 6, -math.pi / 6):.4f} "
        f"vs {p_w2(0.0, math.pi / 6, -math.pi / 6):.4f} at d = 0")
    out(f"[INFO] inside wedge, printed form {p_w4(0.0, 0.5, 1.0):.4f} vs {p_w4_corrected(0.0, 0.5, 1.0):.4f} at d = 0")
    ch = random_channel(rng)
    ratio = b_relay_printed(ch) / b_relay_numeric(ch)
    out(f"[INFO] printed relay B over A^T Sigma^-1 A: {ratio[0, 0]:.4f} (beta / 2 = {ch.beta / 2:.4f})")
    return ok
