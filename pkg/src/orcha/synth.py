"""Deterministic synthetic chart generators.

``downtown_scale_spec`` produces a chart at the scale of the largest
hand-made dataset we target (44 streams, 61 links, 369 labels); the content
is synthetic, only the scale is meaningful. ``random_spec`` yields small
arbitrary valid charts for property tests.
"""

from __future__ import annotations

import random

from .model import ChartSpec, LabelDef, LinkDef, StreamDef, validate

PALETTE = [
    "#D73B2F", "#E08E33", "#D9B03C", "#7A9A3B", "#3E8E62", "#3A8A99",
    "#3E6DA8", "#6A4F9E", "#9E4A87", "#B03A55", "#8A6F4D", "#5C5C5C",
]

WORDS = [
    "cabaret", "loft", "press", "collective", "gallery", "scene", "punk",
    "salon", "cinema", "mimeo", "jazz", "slam", "beat", "fluxus", "happening",
    "archive", "radio", "zine", "squat", "warehouse", "poets", "troupe",
    "bookstore", "theatre", "underground", "revue", "studio", "quartet",
]


def _words(rng: random.Random, n: int) -> str:
    return " ".join(rng.choice(WORDS) for _ in range(n))


def random_spec(
    rng: random.Random,
    max_streams: int = 6,
    max_links: int = 5,
    max_labels: int = 8,
    t_span: int = 12,
) -> ChartSpec:
    """Small random valid chart with integer times (grids always align)."""
    spec = ChartSpec()
    n_streams = rng.randint(1, max_streams)
    for i in range(n_streams):
        sid = f"S{i}"
        parent = None
        candidates = [s for s in spec.streams if s.t1 - s.t0 >= 4]
        if candidates and rng.random() < 0.35:
            parent = rng.choice(candidates)
            t0 = rng.randint(int(parent.t0), int(parent.t1) - 2)
            t1 = rng.randint(t0 + 1, int(parent.t1))
        else:
            t0 = rng.randint(0, t_span - 2)
            t1 = rng.randint(t0 + 1, t_span)
        sizes = []
        if rng.random() < 0.5 and t1 - t0 >= 2:
            kt = rng.randint(t0 + 1, t1 - 1)
            sizes = [(float(kt), float(rng.randint(8, 24)))]
        spec.streams.append(
            StreamDef(
                id=sid, t0=float(t0), t1=float(t1), color=rng.choice(PALETTE),
                sizes=sizes, parent=parent.id if parent else None,
            )
        )

    for _ in range(rng.randint(0, max_links)):
        for _attempt in range(20):
            src, dst = rng.sample(spec.streams, 2) if len(spec.streams) > 1 else (None, None)
            if src is None:
                break
            lo = max(src.t0, dst.t0 - 1)
            hi = min(src.t1, dst.t1 - 1)
            if lo > hi:
                continue
            t0 = float(rng.randint(int(lo), int(hi)))
            spec.links.append(LinkDef(src=src.id, t0=t0, dst=dst.id, merge=rng.random() < 0.4))
            break

    for _ in range(rng.randint(0, max_labels)):
        s = rng.choice(spec.streams)
        spec.labels.append(
            LabelDef(
                stream=s.id,
                t=float(rng.randint(int(s.t0), int(s.t1))),
                text=_words(rng, rng.randint(1, 3)),
                type=rng.choice(["in", "out", "on"]),
                size=rng.choice([1.0, 1.25, 1.5, 2.0]),
            )
        )
    return spec


def downtown_scale_spec(
    n_streams: int = 44,
    n_links: int = 61,
    n_labels: int = 369,
    seed: int = 7,
    t0: int = 1900,
    t1: int = 2000,
) -> ChartSpec:
    """Synthetic chart at Downtown-Body scale; always validates clean."""
    rng = random.Random(seed)
    spec = ChartSpec()
    span = t1 - t0

    for i in range(n_streams):
        sid = f"S{i:02d}"
        parent = None
        candidates = [s for s in spec.streams if s.parent is None and s.t1 - s.t0 >= 20]
        if candidates and rng.random() < 0.3:
            parent = rng.choice(candidates)
            a = rng.randint(int(parent.t0), int(parent.t1) - 10)
            b = rng.randint(a + 6, min(int(parent.t1), a + 30))
        else:
            a = t0 + rng.randint(0, span - 15)
            b = a + rng.randint(10, min(span - (a - t0), 70))
        peak = 14.0 if parent is None else 8.0
        knots = []
        n_knots = rng.randint(1, 3)
        kts = sorted(rng.sample(range(a + 2, b - 1), min(n_knots, max(1, b - a - 3))))
        for kt in kts:
            knots.append((float(kt), round(rng.uniform(peak, peak * 2.5), 1)))
        spec.streams.append(
            StreamDef(
                id=sid, t0=float(a), t1=float(b), color=PALETTE[i % len(PALETTE)],
                sizes=knots, parent=parent.id if parent else None,
            )
        )

    made = 0
    while made < n_links:
        src, dst = rng.sample(spec.streams, 2)
        lo = max(src.t0, dst.t0 - 1)
        hi = min(src.t1, dst.t1 - 1)
        if lo > hi:
            continue
        spec.links.append(
            LinkDef(
                src=src.id, t0=float(rng.randint(int(lo), int(hi))), dst=dst.id,
                merge=rng.random() < 0.3,
            )
        )
        made += 1

    for _ in range(n_labels):
        s = rng.choice(spec.streams)
        spec.labels.append(
            LabelDef(
                stream=s.id,
                t=float(rng.randint(int(s.t0), int(s.t1))),
                text=_words(rng, rng.randint(1, 2)),
                type=rng.choices(["in", "out", "on"], weights=[4, 3, 3])[0],
                size=rng.choice([1.0, 1.0, 1.25, 1.5]),
            )
        )

    violations = validate(spec, step=1.0)
    assert not violations, violations
    return spec
