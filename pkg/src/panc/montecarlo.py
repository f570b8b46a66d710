"""Seeded Monte Carlo simulation of the PANC and CXNC schemes.

Every channel draw owns a counter-based random stream keyed on
``(seed, channel index)``; its link gains, the Random-scheme levels, the
symbol pairs and all noise samples come from that stream.  The same draws
are reused for every SNR and scheme, and results do not depend on the
block size or worker count.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .config import ConfigError, ExperimentConfig
from .ct import sper_ct
from .exact import dest_points, sper_exact
from .geometry import DEGENERATE_EPS, PAIRS, ChannelRealization, DegenerateConstellation, PowerPair, irc_vertices
from .power import baseline_powers, link_snrs, optimize_powers_ct, optimize_powers_exact, scaling_factor

log = logging.getLogger(__name__)

# candidate order giving the lexicographically smallest (x1, x2) on ties
TIE_ORDER = (3, 1, 2, 0)
_CHANNEL_NS = 0
_FIXED_NS = 1


@dataclass(frozen=True)
class TrialOutcome:
    true_pair: int
    relay_pair: int
    forwarded_level: float
    dest_pair: int

    @property
    def error(self):
        return self.dest_pair != self.true_pair


@dataclass
class SweepResult:
    snr_db: float
    scheme: str
    trials: int
    sper_mc: float
    ci95_halfwidth: float
    sper_exact: float | None = None
    exact_ci95: float | None = None
    sper_ct: float | None = None
    ct_ci95: float | None = None
    analytic_channels: int = 0
    confusion: np.ndarray = field(default_factory=lambda: np.zeros((4, 4), dtype=np.int64), repr=False)
    relay_confusion: np.ndarray = field(default_factory=lambda: np.zeros((4, 4), dtype=np.int64), repr=False)

    def pep(self, i, j):
        """Empirical P(T_{i+1} -> T_{j+1}) from the destination confusion counts."""
        row = self.confusion[i]
        return float(row[j]) / max(int(row.sum()), 1)


def ci95(p, n):
    return 1.96 * math.sqrt(p * (1.0 - p) / n) if n > 0 else math.nan


# channels

def link_gains(cfg: ExperimentConfig):
    """Mean power d^-n of each link keyed by name."""
    def dist(p, q):
        d = math.hypot(p[0] - q[0], p[1] - q[1])
        if d == 0.0:
            raise ConfigError(f"zero distance between {p} and {q}")
        return d
    n = cfg.pathloss_exponent
    return {
        "1r": dist(cfg.s1, cfg.relay) ** -n,
        "2r": dist(cfg.s2, cfg.relay) ** -n,
        "1d": dist(cfg.s1, cfg.dest) ** -n,
        "2d": dist(cfg.s2, cfg.dest) ** -n,
        "rd": dist(cfg.relay, cfg.dest) ** -n,
    }


def channel_stream(seed, index):
    ss = np.random.SeedSequence(seed, spawn_key=(_CHANNEL_NS, index))
    return np.random.Generator(np.random.Philox(ss))


def sample_channels(gains, rng, e1=1.0, e2=1.0, sigma2=1.0) -> ChannelRealization:
    """Rayleigh draw of all five links; SD and RD links keep only magnitudes.
    Draws with (near) collinear relay channels are redrawn from ``rng``."""
    def cn(g):
        z = rng.standard_normal(2) * math.sqrt(0.5 * g)
        return complex(z[0], z[1])
    while True:
        h1r, h2r = cn(gains["1r"]), cn(gains["2r"])
        if abs(h1r.real * h2r.imag - h2r.real * h1r.imag) > DEGENERATE_EPS:
            break
        log.debug("degenerate relay channels redrawn")
    return ChannelRealization(h1r, h2r, abs(cn(gains["1d"])), abs(cn(gains["2d"])), abs(cn(gains["rd"])),
                              e1, e2, sigma2)


# single-trial reference path

def _nearest(y, pts):
    best, dbest = TIE_ORDER[0], None
    for j in TIE_ORDER:
        dx, dy = y[0] - pts[j][0], y[1] - pts[j][1]
        d = dx * dx + dy * dy
        if dbest is None or d < dbest:
            best, dbest = j, d
    return best


def relay_detect(y_r: complex, ch: ChannelRealization) -> int:
    """ML pair decision at the relay (index 0..3)."""
    return _nearest((y_r.real, y_r.imag), irc_vertices(ch))


def boxplus_sign(pair, ch: ChannelRealization):
    """sign(|h1R| x1 + |h2R| x2), with sign(0) taken as +1."""
    x1, x2 = PAIRS[pair]
    v = abs(ch.h1r) * x1 + abs(ch.h2r) * x2
    if v == 0.0:
        log.info("boxplus tie resolved as +1")
    return 1 if v >= 0 else -1


def panc_forward(pair, ch: ChannelRealization, p: PowerPair) -> float:
    """Signed relay amplitude sqrt(alpha) * level for the decided pair."""
    return math.sqrt(p.alpha) * p.level(pair)


def dest_detect(y1, y2, ch: ChannelRealization, p: PowerPair, scheme="OriginOpt") -> int:
    coding = "cxnc" if scheme.startswith("CXNC") else "panc"
    return _nearest((y1, y2), dest_points(ch, p, coding))


def simulate_trial(ch: ChannelRealization, p: PowerPair, pair, rng, scheme="OriginOpt") -> TrialOutcome:
    """One trial through the scalar reference path (slow; used in tests)."""
    n = rng.standard_normal(4)
    coding = "cxnc" if scheme.startswith("CXNC") else "panc"
    v = irc_vertices(ch)[pair]
    sr = math.sqrt(0.5 * ch.sigma2)
    r = pair if scheme == "Genie" else relay_detect(complex(v[0] + sr * n[0], v[1] + sr * n[1]), ch)
    pts = dest_points(ch, p, coding)
    sd = math.sqrt(ch.sigma2)
    y1 = pts[pair][0] + sd * n[2]
    y2 = pts[r][1] + sd * n[3]
    return TrialOutcome(pair, r, float(pts[r][1]), dest_detect(y1, y2, ch, p, scheme))


# schemes

def scheme_setup(scheme, ch: ChannelRealization, cfg: ExperimentConfig, random_pp=None, fixed_pp=None,
                 gamma_rd_bar=None):
    """Power pair (alpha included), coding and genie flag of one scheme."""
    e = cfg.er_ave
    s = link_snrs(ch, e, cfg.alpha_mode, gamma_rd_bar)
    alpha = scaling_factor(s)
    panc_alpha = alpha if cfg.use_alpha else 1.0
    if scheme == "OriginOpt":
        return optimize_powers_exact(ch, e).with_alpha(panc_alpha), "panc", False
    if scheme == "CtOpt":
        return optimize_powers_ct(ch, e).with_alpha(panc_alpha), "panc", False
    if scheme == "Random":
        return random_pp.with_alpha(panc_alpha), "panc", False
    if scheme == "Fixed":
        return fixed_pp.with_alpha(panc_alpha), "panc", False
    if scheme == "Genie":
        return optimize_powers_exact(ch, e), "panc", True
    c = math.sqrt(e)
    if scheme == "CXNC":
        return PowerPair(c, c, 1.0, e), "cxnc", False
    if scheme == "CXNCAlpha":
        return PowerPair(c, c, alpha, e), "cxnc", False
    raise ValueError(f"unknown scheme {scheme!r}")


def fixed_powers(cfg: ExperimentConfig):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(cfg.seed, spawn_key=(_FIXED_NS,))))
    return baseline_powers("fixed", cfg.er_ave, rng)


def simulate_fixed(ch: ChannelRealization, p: PowerPair, n_trials, seed=0, coding="panc", genie=False,
                   chunk=250_000):
    """Monte Carlo at one fixed channel.  Returns ``(errors, confusion, relay_confusion)``.

    Pairs and noise come from separate child streams and are drawn as
    doubles, so the result does not depend on ``chunk``.
    """
    ss_pairs, ss_noise = np.random.SeedSequence(seed).spawn(2)
    rng_pairs = np.random.Generator(np.random.Philox(ss_pairs))
    rng_noise = np.random.Generator(np.random.Philox(ss_noise))
    rel = np.ascontiguousarray(irc_vertices(ch)[None])
    dst = np.ascontiguousarray(dest_points(ch, p, coding)[None])
    counts = np.zeros((4, 4), dtype=np.int64)
    rcounts = np.zeros((4, 4), dtype=np.int64)
    done = 0
    while done < n_trials:
        m = min(chunk, n_trials - done)
        pairs = np.floor(4.0 * rng_pairs.random((1, m))).astype(np.int8)
        noise = rng_noise.standard_normal((1, m, 4))
        kernel.simulate_block(rel, dst, genie, math.sqrt(0.5 * ch.sigma2), math.sqrt(ch.sigma2),
                              pairs, noise, counts, rcounts)
        done += m
    return int(counts.sum() - np.trace(counts)), counts, rcounts


# sweep

def _block(cfg, gains, fixed_pp, start, stop, grd_bar):
    nch = stop - start
    ns = cfg.n_symbols
    snrs = cfg.snr_db
    schemes = cfg.schemes
    rel = np.empty((nch, 4, 2))
    dst = {s: np.empty((nch, 4, 2)) for s in schemes}
    pairs = np.empty((nch, ns), dtype=np.int8)
    noise = np.empty((nch, ns, 4))
    setups = []
    for c in range(nch):
        rng = channel_stream(cfg.seed, start + c)
        ch = sample_channels(gains, rng)
        random_pp = baseline_powers("random", cfg.er_ave, rng)
        pairs[c] = rng.integers(0, 4, size=ns, dtype=np.int8)
        noise[c] = rng.standard_normal((ns, 4))
        rel[c] = irc_vertices(ch)
        row = {}
        for s in schemes:
            p, coding, genie = scheme_setup(s, ch, cfg, random_pp, fixed_pp, grd_bar)
            dst[s][c] = dest_points(ch, p, coding)
            row[s] = (p, coding, genie)
        setups.append((ch, row))

    counts = np.zeros((len(snrs), len(schemes), 4, 4), dtype=np.int64)
    rcounts = np.zeros_like(counts)
    for i, snr in enumerate(snrs):
        s2 = 10.0 ** (-snr / 10.0)
        for j, s in enumerate(schemes):
            kernel.simulate_block(rel, dst[s], s == "Genie", math.sqrt(0.5 * s2), math.sqrt(s2),
                                  pairs, noise, counts[i, j], rcounts[i, j])

    # analytic overlays on the leading channel draws
    n_an = max(0, min(stop, cfg.analytic_channels) - start)
    ana = {m: np.full((len(snrs), len(schemes), n_an), np.nan) for m in ("exact", "ct")}
    for c in range(n_an):
        ch, row = setups[c]
        for i, snr in enumerate(snrs):
            chs = ch.with_sigma2(10.0 ** (-snr / 10.0))
            for j, s in enumerate(schemes):
                p, coding, genie = row[s]
                if "exact" in cfg.methods:
                    try:
                        ana["exact"][i, j, c] = sper_exact(chs, p, coding, genie,
                                                           symmetric_shortcut=coding == "panc").total
                    except DegenerateConstellation:
                        log.debug("exact skipped on degenerate draw %d", start + c)
                if "ct" in cfg.methods and coding == "panc":
                    try:
                        ana["ct"][i, j, c] = sper_ct(chs, p, genie=genie)
                    except DegenerateConstellation:
                        log.debug("ct skipped on degenerate draw %d", start + c)
    return counts, rcounts, ana


def run_sweep(cfg: ExperimentConfig, progress=None):
    """Channel-averaged SPER for every SNR and scheme of ``cfg``."""
    cfg.validate()
    gains = link_gains(cfg)
    fixed_pp = fixed_powers(cfg)
    grd_bar = gains["rd"]
    bounds = [(a, min(a + cfg.block_size, cfg.n_channels)) for a in range(0, cfg.n_channels, cfg.block_size)]

    def work(b):
        out = _block(cfg, gains, fixed_pp, b[0], b[1], grd_bar)
        if progress:
            progress(b[1], cfg.n_channels)
        return out

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            parts = list(ex.map(work, bounds))
    else:
        parts = [work(b) for b in bounds]

    counts = sum(p[0] for p in parts)
    rcounts = sum(p[1] for p in parts)
    ana = {m: np.concatenate([p[2][m] for p in parts], axis=2) for m in ("exact", "ct")}
    n = cfg.trials
    results = []
    for i, snr in enumerate(cfg.snr_db):
        for j, s in enumerate(cfg.schemes):
            errs = int(counts[i, j].sum() - np.trace(counts[i, j]))
            p = errs / n
            r = SweepResult(float(snr), s, n, p, ci95(p, n), confusion=counts[i, j].copy(),
                            relay_confusion=rcounts[i, j].copy())
            for m in ("exact", "ct"):
                if m not in cfg.methods:
                    continue
                vals = ana[m][i, j]
                vals = vals[np.isfinite(vals)]
                mean = float(vals.mean()) if vals.size else math.nan
                half = 1.96 * float(vals.std(ddof=1)) / math.sqrt(vals.size) if vals.size > 1 else math.nan
                setattr(r, f"sper_{m}", mean)
                setattr(r, f"{m}_ci95", half)
                r.analytic_channels = int(vals.size)
            results.append(r)
    return results
