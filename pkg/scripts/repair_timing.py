"""Per-change repair cost against a full re-decomposition, plus an end-to-end cost check."""

import argparse
import statistics
import time
from dataclasses import dataclass

import numpy as np

from rsr.decomposition import decompose
from rsr.dynamic import CellChange, apply_change, repair_consistency_check
from rsr.generate import GenSpec, generate_map, sample_instances
from rsr.grid import Connectivity


@dataclass
class Config:
    kind: str = "rooms"
    size: int = 128
    density: float = 0.2
    changes: int = 200
    queries: int = 200
    seed: int = 0


def run(cfg: Config) -> None:
    rng = np.random.default_rng(cfg.seed)
    for conn in (Connectivity.FOUR, Connectivity.EIGHT):
        g = generate_map(GenSpec(cfg.kind, cfg.size, cfg.seed, density=cfg.density), conn)
        d = decompose(g)
        t0 = time.perf_counter()
        decompose(g)
        full = time.perf_counter() - t0
        per = []
        for _ in range(cfg.changes):
            c = (int(rng.integers(cfg.size)), int(rng.integers(cfg.size)))
            t0 = time.perf_counter()
            g, d = apply_change(g, d, CellChange(c, not g.traversable(c)))
            per.append(time.perf_counter() - t0)
        rep = repair_consistency_check(g, d, sample_instances(g, cfg.queries, cfg.seed))
        print(
            f"conn {int(conn)}: repair median {1e6 * statistics.median(per):.0f} us, "
            f"p95 {1e6 * float(np.percentile(per, 95)):.0f} us; full decompose {1e3 * full:.1f} ms; "
            f"{rep.checked} queries, {len(rep.mismatches)} mismatches"
        )


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    d = Config()
    ap.add_argument("--kind", choices=["empty", "random", "rooms"], default=d.kind)
    ap.add_argument("--size", type=int, default=d.size)
    ap.add_argument("--density", type=float, default=d.density)
    ap.add_argument("--changes", type=int, default=d.changes)
    ap.add_argument("--queries", type=int, default=d.queries)
    ap.add_argument("--seed", type=int, default=d.seed)
    a = ap.parse_args()
    run(Config(a.kind, a.size, a.density, a.changes, a.queries, a.seed))
