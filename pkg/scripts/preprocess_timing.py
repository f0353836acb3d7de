"""Wall time of decompose() on rooms maps of increasing size (median of repeats)."""

import argparse
import statistics
import time
from dataclasses import dataclass, field
from typing import List

from rsr.decomposition import decompose
from rsr.generate import GenSpec, generate_map
from rsr.grid import Connectivity


@dataclass
class Config:
    sizes: List[int] = field(default_factory=lambda: [128, 256, 512, 1024])
    kind: str = "rooms"
    density: float = 0.0
    repeats: int = 3
    seed: int = 1


def run(cfg: Config) -> None:
    print("size,conn,rects,interior,pruned,active,median_s")
    for size in cfg.sizes:
        for conn in (Connectivity.FOUR, Connectivity.EIGHT):
            g = generate_map(GenSpec(cfg.kind, size, cfg.seed, density=cfg.density), conn)
            times = []
            for _ in range(cfg.repeats):
                t0 = time.perf_counter()
                d = decompose(g)
                times.append(time.perf_counter() - t0)
            c = d.counts()
            print(
                f"{size},{int(conn)},{c['rectangles']},{c['interior']},{c['pruned']},{c['active']},"
                f"{statistics.median(times):.3f}"
            )


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    d = Config()
    ap.add_argument("--sizes", type=int, nargs="+", default=d.sizes)
    ap.add_argument("--kind", choices=["empty", "random", "rooms"], default=d.kind)
    ap.add_argument("--density", type=float, default=d.density)
    ap.add_argument("--repeats", type=int, default=d.repeats)
    ap.add_argument("--seed", type=int, default=d.seed)
    a = ap.parse_args()
    run(Config(a.sizes, a.kind, a.density, a.repeats, a.seed))
