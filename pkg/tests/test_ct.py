import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from panc.ct import (CONES, a_relay_printed, b_dest_numeric, b_dest_printed, b_relay_numeric, b_relay_printed,
                     ct_dest, ct_from_half_edges, ct_level_probs, ct_relay, eigenvalues_printed, sper_ct)
from panc.exact import relay_level_probs, sper_exact
from panc.geometry import DegenerateConstellation, PowerPair, build_irc
from panc.power import optimize_powers_ct
from panc.special_functions import eigen_2x2
from conftest import make_channel

coord = st.floats(-3, 3).filter(lambda x: abs(x) > 1e-3)


def rect_errors(t, f1, f2):
    v = t.vertices
    sides = max(abs(np.linalg.norm(v[0] - v[1]) - 2 * np.linalg.norm(f1)),
                abs(np.linalg.norm(v[0] - v[2]) - 2 * np.linalg.norm(f2)))
    shape = max(np.abs(v[0] + v[3]).max(), np.abs(v[1] + v[2]).max(), abs((v[0] - v[1]) @ (v[0] - v[2])))
    return sides, shape


@given(coord, coord, coord, coord, st.floats(0.01, 5))
def test_rectangle_and_side_lengths(a, b, c, d, var):
    f1, f2 = np.array([a, b]), np.array([c, d])
    if abs(a * d - b * c) < 1e-2:
        return
    t = ct_from_half_edges(f1, f2, var)
    sides, shape = rect_errors(t, f1, f2)
    scale = 1.0 + np.abs(t.vertices).max() ** 2
    assert sides <= 1e-9 * scale
    assert shape <= 1e-9 * scale
    # noise is decorrelated and each vertex owns its own cone
    np.testing.assert_allclose(t.noise_cov, np.diag(1.0 / t.lam), atol=1e-9 * np.abs(t.noise_cov).max())
    assert t.vertices[0, 1] >= 0
    for v, cell in zip(t.vertices, t.cells):
        assert cell.contains(v)


@given(coord, coord, coord, coord, st.floats(-5, 5), st.floats(-5, 5))
def test_cone_rule_is_zero_forcing(a, b, c, d, y1, y2):
    if abs(a * d - b * c) < 1e-2:
        return
    f1, f2 = np.array([a, b]), np.array([c, d])
    t = ct_from_half_edges(f1, f2, 1.0)
    y = np.array([y1, y2])
    cone = [k for k in range(4) if t.cells[k].contains(t.apply(y))]
    s = np.linalg.solve(np.column_stack([f1, f2]), y)
    if min(abs(s)) < 1e-9 or len(cone) != 1:
        return
    zf = [k for k, (x1, x2) in enumerate(((1, 1), (-1, 1), (1, -1), (-1, -1)))
          if np.sign(s[0]) == x1 and np.sign(s[1]) == x2]
    assert cone == zf


def test_cones_tile_plane(rng):
    z = rng.standard_normal((1000, 2))
    hits = sum(c.contains(z).astype(int) for c in CONES.values())
    assert np.all(hits == 1)


def test_ml_relay_beats_cone_rule(rng):
    for _ in range(10):
        ch = make_channel(rng, sigma2=0.3)
        ml = relay_level_probs(build_irc(ch), ch.sigma2, pairs=(0, 1, 2, 3))
        ct = ct_level_probs(ct_relay(ch), pairs=(0, 1, 2, 3))
        np.testing.assert_allclose(ct.row_sums(), 1.0, atol=1e-9)
        assert np.trace(ct.probs) <= np.trace(ml.probs) + 1e-12


def test_printed_relay_b_differs_by_beta_over_two(rng):
    for _ in range(5):
        ch = make_channel(rng, sigma2=0.4)
        ratio = b_relay_printed(ch) / b_relay_numeric(ch)
        np.testing.assert_allclose(ratio, ch.beta / 2, rtol=1e-10)
        # the printed A maps the relay constellation onto the axes
        v = np.array([[z.real, z.imag] for z in (ch.h1r + ch.h2r, -ch.h1r + ch.h2r)])
        w = v @ a_relay_printed(ch).T
        assert abs(w[0, 0]) == pytest.approx(abs(w[1, 0]))
    print(f"printed relay B / A^T Sigma^-1 A = beta/2, e.g. {ch.beta / 2:.4f}")


def test_printed_dest_b_reported(channel):
    p = optimize_powers_ct(channel)
    printed = b_dest_printed(channel, p)
    numeric = b_dest_numeric(channel, p)
    print(f"destination B printed {printed.ravel()} vs numeric {numeric.ravel()}")
    assert numeric[0, 0] == pytest.approx(numeric[1, 1])


def test_printed_eigenvalues(channel):
    b = ct_relay(channel).b
    np.testing.assert_allclose(eigenvalues_printed(b), eigen_2x2(b)[0], rtol=1e-12)


def test_degenerate():
    with pytest.raises(DegenerateConstellation):
        ct_from_half_edges([1.0, 1.0], [2.0, 2.0], 1.0)


def test_sper_ct_properties(channel):
    p = optimize_powers_ct(channel)
    total, info = sper_ct(channel, p, full_output=True)
    assert 0.0 <= total <= 1.0
    np.testing.assert_allclose(info["relay"].row_sums()[:2], 1.0, atol=1e-9)
    # the cone rule is never better than the ML cells at high SNR
    ch = channel.with_sigma2(0.01)
    assert sper_ct(ch, p) >= sper_exact(ch, p).total
    assert sper_ct(ch, p, genie=True) <= sper_ct(ch, p)


def test_dest_transform_sides(channel):
    p = PowerPair(1.2, -0.3, 0.6)
    t = ct_dest(channel, p)
    g = math.sqrt(p.alpha) * channel.hrd
    sides, shape = rect_errors(t, [channel.h1d, 0.5 * (p.a - p.b) * g], [channel.h2d, 0.5 * (p.a + p.b) * g])
    assert sides < 1e-12 and shape < 1e-12
