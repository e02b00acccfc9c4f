"""Pure-Python force-simulation kernel.

This is the fallback twin of the compiled ``orcha._kernels`` extension. Both
implement the exact same arithmetic in the exact same order so that results
are bit-identical regardless of which backend is active; any change here must
be mirrored in ``_kernels.pyx``.

Per tick: gravity toward the canvas mid-height, inverse-square repulsion over
the precomputed pair list, springs per edge with per-edge stiffness, velocity
integration with decay, then hard position clamps (canvas boundary for free
nodes, parent containment for nested nodes, parents processed first) and the
alpha decay. All force magnitudes scale with the current alpha.
"""

from __future__ import annotations

from math import sqrt

# squared distance floor for the repulsion kernel: below this, pairs repel as
# if 5 px apart (keeps the coincident-node kick bounded)
DMIN2 = 25.0


def simulate(
    y, vy, f, x, size, parent, order,
    pair_i, pair_j, pair_dir,
    spr_src, spr_dst, spr_k, spr_rest,
    gravity, repulsion, cutoff,
    velocity_decay, center_y, height, padding,
    alpha, alpha_decay, alpha_min, max_ticks,
):
    """Advance the simulation; mutates y and vy in place.

    Returns (alpha, ticks_run). Stops when alpha drops to alpha_min or after
    max_ticks.
    """
    n = len(y)
    npairs = len(pair_i)
    nspr = len(spr_src)
    cutoff2 = cutoff * cutoff
    ticks = 0

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
                # coincident nodes: deterministic pseudo-random direction
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

        # hard clamps; `order` lists parents before children so a child sees
        # its parent's final position for this tick
        for k in range(n):
            i = order[k]
            half = 0.5 * size[i]
            p = parent[i]
            if p < 0:
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
                ph = 0.5 * size[p]
                # oversized children pin to the parent's center instead
                ch = half if half < ph else ph
                lo = y[p] - ph + ch
                hi = y[p] + ph - ch
                if y[i] < lo:
                    y[i] = lo
                    vy[i] = 0.0
                elif y[i] > hi:
                    y[i] = hi
                    vy[i] = 0.0

        alpha = alpha * alpha_decay
        ticks += 1

    return alpha, ticks
