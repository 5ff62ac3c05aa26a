from __future__ import annotations

from ttpnr.oracle import random_instance


def small_instances(count: int, seed0: int = 0, **kw):
    """Seeded small instances: 3-8 real activities, 1-2 resources, durations <= 5."""
    out = []
    for s in range(seed0, seed0 + count):
        n = 3 + s % 6
        k = 1 + s % 2
        out.append(
            random_instance(
                s, n, k, kw.get("max_duration", 5), kw.get("density", 0.6),
                edge_prob=kw.get("edge_prob", 0.25 + 0.05 * (s % 4)),
                zero_duration_prob=kw.get("zero_duration_prob", 0.1 if s % 5 == 0 else 0.0),
            )
        )
    return out
