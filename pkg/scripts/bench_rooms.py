"""Plain A* vs symmetry-reduced A* on generated rooms maps; writes one CSV per map.

    python scripts/bench_rooms.py --sizes 127 256 --instances 500 --out results/
"""

import argparse
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

from rsr import bench
from rsr.decomposition import decompose
from rsr.generate import GenSpec, generate_map, sample_instances
from rsr.grid import Connectivity
from rsr.search import SearchOptions


@dataclass
class Config:
    sizes: List[int] = field(default_factory=lambda: [127, 256])
    room: int = 7
    door_p: float = 0.5
    instances: int = 500
    seed: int = 0
    conn: int = 8
    pr: bool = True
    op: bool = True
    out: Path = Path("results")


def run(cfg: Config) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    opts = SearchOptions(online_pruning=cfg.op, perimeter_reduction=cfg.pr)
    for size in cfg.sizes:
        spec = GenSpec("rooms", size, cfg.seed, room=cfg.room, door_p=cfg.door_p)
        g = generate_map(spec, Connectivity.parse(cfg.conn))
        t0 = time.perf_counter()
        d = decompose(g)
        prep = time.perf_counter() - t0
        inst = sample_instances(g, cfg.instances, cfg.seed + 1)
        rows = bench.run_bench(g, inst, f"rooms{size}", opts, d)
        path = cfg.out / f"rooms{size}_c{cfg.conn}.csv"
        with open(path, "w", newline="") as fh:
            bench.write_csv(rows, fh)
        s = bench.summarize(rows)
        print(
            f"rooms{size}: {len(d.rects)} rects, preprocess {prep * 1e3:.0f} ms | "
            f"expanded {s.mean_expanded_rsr:.0f} vs {s.mean_expanded_plain:.0f} "
            f"(ratio {s.expansion_ratio:.3f}) | time speedup {s.speedup:.2f}x | {path}"
        )


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    d = Config()
    ap.add_argument("--sizes", type=int, nargs="+", default=d.sizes)
    ap.add_argument("--room", type=int, default=d.room)
    ap.add_argument("--door-p", type=float, default=d.door_p)
    ap.add_argument("--instances", type=int, default=d.instances)
    ap.add_argument("--seed", type=int, default=d.seed)
    ap.add_argument("--conn", type=int, choices=[4, 8], default=d.conn)
    ap.add_argument("--no-pr", action="store_true")
    ap.add_argument("--no-op", action="store_true")
    ap.add_argument("--out", type=Path, default=d.out)
    a = ap.parse_args()
    run(Config(a.sizes, a.room, a.door_p, a.instances, a.seed, a.conn, not a.no_pr, not a.no_op, a.out))


if __name__ == "__main__":
    main()
