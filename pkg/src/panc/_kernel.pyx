# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo kernel: relay ML detection, forwarding and joint
destination detection for a block of channels."""

# candidate order giving the lexicographically smallest (x1, x2) on ties
cdef int[4] _ORDER = [3, 1, 2, 0]


cdef inline int _nearest(double y0, double y1, const double[:, ::1] pts) noexcept nogil:
    cdef int best = _ORDER[0]
    cdef double dx = y0 - pts[best, 0]
    cdef double dy = y1 - pts[best, 1]
    cdef double dbest = dx * dx + dy * dy
    cdef double d
    cdef int m, j
    for m in range(1, 4):
        j = _ORDER[m]
        dx = y0 - pts[j, 0]
        dy = y1 - pts[j, 1]
        d = dx * dx + dy * dy
        if d < dbest:
            dbest = d
            best = j
    return best


def simulate_block(const double[:, :, ::1] relay_pts, const double[:, :, ::1] dest_pts,
                   bint genie, double sigma_r, double sigma_d,
                   const signed char[:, ::1] pairs, const double[:, :, ::1] noise,
                   long long[:, ::1] counts, long long[:, ::1] relay_counts):
    """Accumulate destination and relay confusion counts in place.

    ``relay_pts[c]`` and ``dest_pts[c]`` hold the four noiseless points of
    channel ``c``; the second coordinate of ``dest_pts[c, k]`` is also what
    the relay transmits after deciding ``k``.  ``noise[c, s]`` supplies the
    four unit normals of trial ``s``.
    """
    cdef Py_ssize_t nc = pairs.shape[0]
    cdef Py_ssize_t ns = pairs.shape[1]
    cdef Py_ssize_t c, s
    cdef int t, r, d
    cdef double y0, y1
    with nogil:
        for c in range(nc):
            for s in range(ns):
                t = pairs[c, s]
                if genie:
                    r = t
                else:
                    y0 = relay_pts[c, t, 0] + sigma_r * noise[c, s, 0]
                    y1 = relay_pts[c, t, 1] + sigma_r * noise[c, s, 1]
                    r = _nearest(y0, y1, relay_pts[c])
                y0 = dest_pts[c, t, 0] + sigma_d * noise[c, s, 2]
                y1 = dest_pts[c, r, 1] + sigma_d * noise[c, s, 3]
                d = _nearest(y0, y1, dest_pts[c])
                relay_counts[t, r] += 1
                counts[t, d] += 1
