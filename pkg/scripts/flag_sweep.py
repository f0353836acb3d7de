"""Random small-map sweep: every flag setting against plain A*, with validate() on each map."""

import argparse
import random
from dataclasses import dataclass

from rsr.decomposition import decompose, validate
from rsr.grid import Connectivity, GridMap, free_cells
from rsr.search import FLAG_MATRIX, astar_plain, astar_rsr


@dataclass
class Config:
    maps: int = 300
    max_side: int = 14
    queries: int = 5
    seed: int = 1


def run(cfg: Config) -> int:
    rng = random.Random(cfg.seed)
    bad = searches = 0
    for _ in range(cfg.maps):
        w, h = rng.randint(1, cfg.max_side), rng.randint(1, cfg.max_side)
        p = rng.choice([0.0, 0.1, 0.2, 0.3, 0.4])
        rows = ["".join("@" if rng.random() < p else "." for _ in range(w)) for _ in range(h)]
        for conn in (Connectivity.FOUR, Connectivity.EIGHT):
            g = GridMap.from_rows(rows, conn)
            d = decompose(g)
            rep = validate(d, g)
            if not rep:
                print("invalid decomposition:", rep, rows)
                bad += 1
            cells = free_cells(g)
            if not cells:
                continue
            for _ in range(cfg.queries):
                s, t = rng.choice(cells), rng.choice(cells)
                ref = astar_plain(g, s, t)
                for opt in FLAG_MATRIX:
                    got = astar_rsr(g, d, s, t, opt)
                    searches += 1
                    if (got is None) != (ref is None) or (got and abs(got.cost - ref.cost) > 1e-6):
                        bad += 1
                        print("mismatch", rows, int(conn), s, t, opt)
    print(f"{searches} searches, {bad} problems")
    return bad


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    d = Config()
    ap.add_argument("--maps", type=int, default=d.maps)
    ap.add_argument("--max-side", type=int, default=d.max_side)
    ap.add_argument("--queries", type=int, default=d.queries)
    ap.add_argument("--seed", type=int, default=d.seed)
    a = ap.parse_args()
    raise SystemExit(1 if run(Config(a.maps, a.max_side, a.queries, a.seed)) else 0)
