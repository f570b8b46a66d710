"""Exact instantaneous symbol-pair error rate from relay level probabilities
and destination conditional errors, both evaluated by wedge decomposition."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (PAIRS, ChannelRealization, Constellation, DegenerateConstellation, PowerPair, build_idc,
                       build_irc, voronoi_cell)
from .regions import ConvexRegion
from .wedge import decompose_cell

RELAY_LEVELS = ("+a", "+b", "-b", "-a")


@dataclass
class RelayLevelDistribution:
    """``probs[i, k]`` = P(relay decides V_{k+1} | T_{i+1} sent).

    Rows that were not evaluated are NaN.  Column k is the level
    +a, +b, -b, -a for PANC.
    """

    probs: np.ndarray
    case_tag: int = 0

    def row_sums(self):
        return np.nansum(self.probs, axis=1)


@dataclass
class SperBreakdown:
    total: float
    dest: np.ndarray  # dest[i, k] = P(error | T_{i+1}, relay decision k)
    relay: RelayLevelDistribution
    relay_case: int
    dest_case: int
    pairs: tuple = (0, 1)
    per_pair: np.ndarray = field(default_factory=lambda: np.full(4, np.nan))

    def recompute(self):
        rows = [float(self.dest[i] @ self.relay.probs[i]) for i in self.pairs]
        return sum(rows) / len(rows)


def _cells(points):
    return [ConvexRegion.closer_to(points[i], [points[j] for j in range(4) if j != i]) for i in range(4)]


def relay_level_probs(irc: Constellation, sigma2: float, case=None, pairs=(0, 1)) -> RelayLevelDistribution:
    """Probabilities of each relay decision given the sent pair.

    Relay noise is complex with variance ``sigma2 / 2`` per dimension.  The
    ``case`` argument is accepted for symmetry with the case-based recipe;
    the edge decomposition does not need it.
    """
    var = 0.5 * sigma2
    cells = [voronoi_cell(irc, k) for k in range(4)]
    probs = np.full((4, 4), np.nan)
    for i in pairs:
        mean = irc.vertices[i]
        for k in range(4):
            probs[i, k] = decompose_cell(mean, cells[k], var).evaluate()
    return RelayLevelDistribution(probs, irc.case_tag if case is None else case)


def forward_amplitudes(p: PowerPair, coding="panc"):
    """Signed relay amplitude (before alpha) for each relay decision V1..V4."""
    if coding == "panc":
        return np.array([p.level(k) for k in range(4)])
    if coding == "cxnc":
        c = math.sqrt(p.er_ave)
        return np.array([c * x1 * x2 for x1, x2 in PAIRS])
    raise ValueError(f"unknown network coding {coding!r}")


def dest_points(ch: ChannelRealization, p: PowerPair, coding="panc"):
    """Destination reference points under correct forwarding."""
    amps = forward_amplitudes(p, coding)
    g = math.sqrt(p.alpha) * ch.hrd
    u1 = math.sqrt(ch.e1) * ch.h1d
    u2 = math.sqrt(ch.e2) * ch.h2d
    return np.array([[x1 * u1 + x2 * u2, amps[i] * g] for i, (x1, x2) in enumerate(PAIRS)])


def displaced_mean(ch: ChannelRealization, p: PowerPair, true_pair: int, decision: int, coding="panc"):
    amps = forward_amplitudes(p, coding)
    x1, x2 = PAIRS[true_pair]
    x = math.sqrt(ch.e1) * ch.h1d * x1 + math.sqrt(ch.e2) * ch.h2d * x2
    return np.array([x, math.sqrt(p.alpha) * ch.hrd * amps[decision]])


def dest_conditional_error(ch: ChannelRealization, p: PowerPair, true_pair: int, decision: int,
                           coding="panc", cells=None) -> float:
    """P(destination error | T_{true_pair+1} sent, relay decided V_{decision+1}).

    Destination noise is real with variance ``sigma2`` on each observation.
    """
    if cells is None:
        cells = _cells(dest_points(ch, p, coding))
    mean = displaced_mean(ch, p, true_pair, decision, coding)
    return 1.0 - decompose_cell(mean, cells[true_pair], ch.sigma2).evaluate()


def sper_exact(ch: ChannelRealization, p: PowerPair, coding="panc", genie=False,
               symmetric_shortcut=True) -> SperBreakdown:
    """Instantaneous SPER for one channel realization.

    With ``symmetric_shortcut`` the average runs over T1 and T2 only
    (T4 and T3 mirror them); otherwise all four pairs are evaluated.
    ``genie=True`` makes the relay decision always correct.
    """
    irc = build_irc(ch)
    pairs = (0, 1) if symmetric_shortcut else (0, 1, 2, 3)
    if genie:
        relay = RelayLevelDistribution(np.eye(4), irc.case_tag)
    else:
        relay = relay_level_probs(irc, ch.sigma2, pairs=pairs)
    pts = dest_points(ch, p, coding)
    dest_case = 0
    if coding == "panc":
        # case tag is informational; a flat IDC still has valid Voronoi cells
        try:
            dest_case = build_idc(ch, p).case_tag
        except DegenerateConstellation:
            dest_case = -1
    cells = _cells(pts)
    dest = np.full((4, 4), np.nan)
    per_pair = np.full(4, np.nan)
    for i in pairs:
        row = 0.0
        for k in range(4):
            w = relay.probs[i, k]
            if w == 0.0 and genie:
                continue
            dest[i, k] = dest_conditional_error(ch, p, i, k, coding, cells)
            row += dest[i, k] * w
        per_pair[i] = row
    total = float(np.nanmean(per_pair[list(pairs)]))
    return SperBreakdown(total, dest, relay, irc.case_tag, dest_case, pairs, per_pair)
