"""Pure numpy version of the Monte Carlo kernel, same contract as the
compiled one."""
import numpy as np

# candidate order giving the lexicographically smallest (x1, x2) on ties
_ORDER = np.array([3, 1, 2, 0])


def _nearest(y0, y1, pts):
    # pts: (C, 4, 2); y0, y1: (C, S)
    p = pts[:, _ORDER, :]
    dx = y0[:, :, None] - p[:, None, :, 0]
    dy = y1[:, :, None] - p[:, None, :, 1]
    return _ORDER[np.argmin(dx * dx + dy * dy, axis=2)]


def simulate_block(relay_pts, dest_pts, genie, sigma_r, sigma_d, pairs, noise, counts, relay_counts):
    t = pairs.astype(np.intp)
    rows = np.arange(t.shape[0])[:, None]
    if genie:
        r = t
    else:
        v = relay_pts[rows, t]
        r = _nearest(v[..., 0] + sigma_r * noise[..., 0], v[..., 1] + sigma_r * noise[..., 1], relay_pts)
    y0 = dest_pts[rows, t, 0] + sigma_d * noise[..., 2]
    y1 = dest_pts[rows, r, 1] + sigma_d * noise[..., 3]
    d = _nearest(y0, y1, dest_pts)
    np.add.at(relay_counts, (t.ravel(), r.ravel()), 1)
    np.add.at(counts, (t.ravel(), d.ravel()), 1)
