# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled force-simulation kernel.

Line-for-line twin of ``orcha._kernels_py.simulate``: identical operation
order and IEEE semantics (built with -ffp-contract=off, no fast-math) so both
backends produce bit-identical positions.
"""

from libc.math cimport sqrt

cdef double DMIN2 = 25.0


def simulate(
    double[::1] y, double[::1] vy, double[::1] f,
    double[::1] x, double[::1] size,
    int[::1] parent, int[::1] order,
    int[::1] pair_i, int[::1] pair_j, double[::1] pair_dir,
    int[::1] spr_src, int[::1] spr_dst, double[::1] spr_k, double[::1] spr_rest,
    double gravity, double repulsion, double cutoff,
    double velocity_decay, double center_y, double height, double padding,
    double alpha, double alpha_decay, double alpha_min, int max_ticks,
):
    """Advance the simulation; mutates y and vy in place.

    Returns (alpha, ticks_run). Stops when alpha drops to alpha_min or after
    max_ticks.
    """
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t npairs = pair_i.shape[0]
    cdef Py_ssize_t nspr = spr_src.shape[0]
    cdef double cutoff2 = cutoff * cutoff
    cdef int ticks = 0
    cdef Py_ssize_t i, j, k, p, e, a, b
    cdef int pi
    cdef double dx, dy, d2, d2c, d, mag, fy, half, ph, ch, lo, hi

    while ticks < max_ticks and alpha > alpha_min:
        for i in range(n):
            f[i] = (center_y - y[i]) * gravity * alpha

        for p in range(npairs):
            i = pair_i[p]
            j = pair_j[p]
            dx = x[j] - x[i]
            dy = y[j] - y[i]
            d2 = dx * dx + dy * dy
            if d2 > cutoff2:
                continue
            if d2 < 1e-12:
                fy = (repulsion * alpha / DMIN2) * pair_dir[p]
            else:
                d2c = d2 if d2 > DMIN2 else DMIN2
                d = sqrt(d2)
                mag = repulsion * alpha / d2c
                fy = mag * (dy / d)
            f[i] -= fy
            f[j] += fy

        for e in range(nspr):
            a = spr_src[e]
            b = spr_dst[e]
            dx = x[b] - x[a]
            dy = y[b] - y[a]
            d2 = dx * dx + dy * dy
            if d2 < 1e-12:
                continue
            d = sqrt(d2)
            mag = spr_k[e] * (d - spr_rest[e]) * alpha
            fy = mag * (dy / d) * 0.5
            f[a] += fy
            f[b] -= fy

        for i in range(n):
            vy[i] = vy[i] * velocity_decay + f[i]
            y[i] += vy[i]

        for k in range(n):
            i = order[k]
            half = 0.5 * size[i]
            pi = parent[i]
            if pi < 0:
                lo = half + padding
                hi = height - half - padding
                if lo > hi:
                    y[i] = 0.5 * height
                    vy[i] = 0.0
                elif y[i] < lo:
                    y[i] = lo
                    vy[i] = 0.0
                elif y[i] > hi:
                    y[i] = hi
                    vy[i] = 0.0
            else:
                ph = 0.5 * size[pi]
                ch = half if half < ph else ph
                lo = y[pi] - ph + ch
                hi = y[pi] + ph - ch
                if y[i] < lo:
                    y[i] = lo
                    vy[i] = 0.0
                elif y[i] > hi:
                    y[i] = hi
                    vy[i] = 0.0

        alpha = alpha * alpha_decay
        ticks += 1

    return alpha, ticks
