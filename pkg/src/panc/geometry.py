"""Relay and destination constellations, their Voronoi cells and the
six-way case classification."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .regions import ConvexRegion

# symbol pairs T1..T4 as (x1, x2); index 0..3 everywhere in the package
PAIRS = ((1, 1), (-1, 1), (1, -1), (-1, -1))
# relay level attached to each pair: +a, +b, -b, -a
LEVEL_SIGN = (1, 1, -1, -1)
LEVEL_IS_A = (True, False, False, True)
LEVEL_NAMES = ("+a", "+b", "-b", "-a")

DEGENERATE_EPS = 1e-9


class DegenerateConstellation(ValueError):
    """Raised when the four constellation points are (nearly) collinear."""


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of all five links plus energies and noise variance.

    ``h1r``/``h2r`` are complex; ``h1d``, ``h2d`` and ``hrd`` are the
    magnitudes of the destination links (phases assumed pre-equalized).
    """

    h1r: complex
    h2r: complex
    h1d: float
    h2d: float
    hrd: float
    e1: float = 1.0
    e2: float = 1.0
    sigma2: float = 1.0

    def __post_init__(self):
        if min(self.h1d, self.h2d, self.hrd) < 0:
            raise ValueError("link magnitudes must be non-negative")
        if self.sigma2 <= 0 or self.e1 <= 0 or self.e2 <= 0:
            raise ValueError("energies and noise variance must be positive")

    @property
    def beta(self):
        """Re(h1R) Im(h2R) - Re(h2R) Im(h1R)."""
        return self.h1r.real * self.h2r.imag - self.h2r.real * self.h1r.imag

    def with_sigma2(self, sigma2):
        return ChannelRealization(self.h1r, self.h2r, self.h1d, self.h2d, self.hrd,
                                  self.e1, self.e2, sigma2)


@dataclass(frozen=True)
class PowerPair:
    """Relay amplitudes (a, b), scaling factor alpha and the power budget.

    ``b`` may be negative: the level assigned to T2 is then below the axis,
    which the CT-based Max-min solution can require.
    """

    a: float
    b: float
    alpha: float = 1.0
    er_ave: float = 1.0

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("a must be non-negative")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.a ** 2 + self.b ** 2 > 2.0 * self.er_ave + 1e-9:
            raise ValueError("power budget a^2 + b^2 <= 2 E_R exceeded")

    def level(self, pair_index):
        """Signed, unscaled relay amplitude for pair T_{i+1}."""
        amp = self.a if LEVEL_IS_A[pair_index] else self.b
        return LEVEL_SIGN[pair_index] * amp

    def with_alpha(self, alpha):
        return PowerPair(self.a, self.b, alpha, self.er_ave)


@dataclass
class Constellation:
    """Four points V1..V4 (rows of ``vertices``) with derived geometry."""

    vertices: np.ndarray
    midpoints: dict = field(default_factory=dict)
    m1: np.ndarray | None = None
    m2: np.ndarray | None = None
    m1_in_p: bool = False
    m2_in_p: bool = False
    case_tag: int = 0

    @property
    def center(self):
        return 0.5 * (self.vertices[0] + self.vertices[3])

    def side(self, i, j):
        return float(np.linalg.norm(self.vertices[i - 1] - self.vertices[j - 1]))


def _circumcenter(p, q, r):
    a = 2.0 * np.array([q - p, r - p])
    rhs = np.array([q @ q - p @ p, r @ r - p @ p])
    return np.linalg.solve(a, rhs)


def _in_parallelogram(v, z, tol=1e-12):
    """Barycentric test of z against the parallelogram V1 V2 V4 V3 (inclusive)."""
    c = 0.5 * (v[0] + v[3])
    e1 = 0.5 * (v[0] - v[1])
    e2 = 0.5 * (v[0] - v[2])
    s, t = np.linalg.solve(np.column_stack([e1, e2]), z - c)
    return bool(abs(s) <= 1.0 + tol and abs(t) <= 1.0 + tol)


def _finish(vertices):
    v = np.asarray(vertices, dtype=float)
    c = Constellation(v)
    c.midpoints = {(i, j): 0.5 * (v[i - 1] + v[j - 1]) for i, j in ((1, 2), (1, 3), (2, 4), (3, 4))}
    c.m1 = _circumcenter(v[0], v[1], v[2])
    c.m2 = _circumcenter(v[1], v[2], v[3])
    c.m1_in_p = _in_parallelogram(v, c.m1)
    c.m2_in_p = _in_parallelogram(v, c.m2)
    c.case_tag = classify_case(c)
    return c


def irc_vertices(ch: ChannelRealization):
    s1 = math.sqrt(ch.e1) * ch.h1r
    s2 = math.sqrt(ch.e2) * ch.h2r
    pts = [x1 * s1 + x2 * s2 for x1, x2 in PAIRS]
    return np.array([[p.real, p.imag] for p in pts])


def build_irc(ch: ChannelRealization) -> Constellation:
    """Noiseless relay observations for T1..T4 as points in the plane."""
    if abs(ch.beta) <= DEGENERATE_EPS:
        raise DegenerateConstellation(f"collinear relay channels (beta={ch.beta:.3e})")
    return _finish(irc_vertices(ch))


def idc_vertices(ch: ChannelRealization, p: PowerPair):
    u1 = math.sqrt(ch.e1) * ch.h1d
    u2 = math.sqrt(ch.e2) * ch.h2d
    g = math.sqrt(p.alpha) * ch.hrd
    return np.array([[x1 * u1 + x2 * u2, p.level(i) * g] for i, (x1, x2) in enumerate(PAIRS)])


def build_idc(ch: ChannelRealization, p: PowerPair) -> Constellation:
    """Destination reference points (y1, y2) for T1..T4 under correct forwarding."""
    v = idc_vertices(ch, p)
    e1 = v[0] - v[1]
    e2 = v[0] - v[2]
    cross = e1[0] * e2[1] - e1[1] * e2[0]
    scale = np.linalg.norm(e1) * np.linalg.norm(e2)
    if scale == 0.0 or abs(cross) <= DEGENERATE_EPS * scale:
        raise DegenerateConstellation("destination constellation is collinear")
    return _finish(v)


def mislabeled_points(ch: ChannelRealization, p: PowerPair, true_pair: int, forwarded_level: float):
    """Mean of (y1, y2) when pair ``true_pair`` (0..3) is sent and the relay
    forwards the signed amplitude ``forwarded_level`` (before alpha scaling)."""
    x1, x2 = PAIRS[true_pair]
    x = math.sqrt(ch.e1) * ch.h1d * x1 + math.sqrt(ch.e2) * ch.h2d * x2
    y = math.sqrt(p.alpha) * forwarded_level * ch.hrd
    return np.array([x, y])


def classify_case(c: Constellation) -> int:
    """Case number 1..6 from diagonal lengths, M1/M2 membership and sides."""
    long_14 = c.side(1, 4) > c.side(2, 3)
    inside = c.m1_in_p and c.m2_in_p
    wide_12 = c.side(1, 2) > c.side(1, 3)
    if long_14:
        if inside:
            return 3
        return 1 if wide_12 else 2
    if inside:
        return 6
    return 4 if wide_12 else 5


def voronoi_cell(c: Constellation, i: int) -> ConvexRegion:
    """ML decision region of vertex ``i`` (0-based) as an intersection of
    perpendicular-bisector half-planes."""
    v = c.vertices
    return ConvexRegion.closer_to(v[i], [v[j] for j in range(4) if j != i])


def geometry_dump(c: Constellation, label="constellation") -> str:
    fmt = lambda z: f"({z[0]: .6f}, {z[1]: .6f})"
    lines = [f"[{label}]"]
    for k, z in enumerate(c.vertices, start=1):
        lines.append(f"V{k} = {fmt(z)}")
    for (i, j), z in c.midpoints.items():
        lines.append(f"M{i}{j} = {fmt(z)}")
    lines.append(f"M1 = {fmt(c.m1)}  in_P={c.m1_in_p}")
    lines.append(f"M2 = {fmt(c.m2)}  in_P={c.m2_in_p}")
    lines.append(f"|V1V2| = {c.side(1, 2):.6f}  |V1V3| = {c.side(1, 3):.6f}")
    lines.append(f"|V1V4| = {c.side(1, 4):.6f}  |V2V3| = {c.side(2, 3):.6f}")
    lines.append(f"case = {c.case_tag}")
    return "\n".join(lines)
