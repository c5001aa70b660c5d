"""Sample random certificates and tally what the verifiers conclude.

Each sample is a composite of full-group lifts, block round trips and
relabelings over one named matrix. For each one the script extracts the
orbit data and checks the cocycle identity at sampled points. It then asks
whether the map is an eventual conjugacy and whether the cocycle is
cohomologous to 1.

    python3 scripts/sample_certificates.py --matrix A2 --count 100 --seed 7
"""

from __future__ import annotations

import argparse
import random
from collections import Counter
from dataclasses import dataclass

from markovcoe.equiv import check_lemma_useful, scoe_check, verify_eventual_conjugacy
from markovcoe.generators import NAMED_MATRICES, named, random_certificate
from markovcoe.sft import random_point
from markovcoe.transducer import extract_coe_data, verify_homeomorphism


@dataclass
class SampleConfig:
    matrix: str = "A2"
    count: int = 50
    seed: int = 0
    points: int = 50
    k_bound: int = 16


def sample(cfg: SampleConfig) -> Counter:
    A = named(cfg.matrix)
    rng = random.Random(cfg.seed)
    tally: Counter = Counter()
    for _ in range(cfg.count):
        c = random_certificate(A, rng)
        if not verify_homeomorphism(c):
            tally["not a homeomorphism"] += 1
            continue
        data = extract_coe_data(c)
        if data is None:
            tally["orbit data not found"] += 1
            continue
        pts = [random_point(c.target, rng) for _ in range(cfg.points)]
        tally["identity holds" if check_lemma_useful(c, data, pts) else "identity FAILS"] += 1
        ev = verify_eventual_conjugacy(c, cfg.k_bound)
        tally["eventual conjugacy" if ev else "no constant lag found"] += 1
        tally[f"cocycle constant {data.c1.constant_value}" if data.c1.is_constant else "cocycle not constant"] += 1
        tally[f"cohomologous to 1: {scoe_check(c, data).status}"] += 1
    return tally


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--matrix", choices=list(NAMED_MATRICES), default="A2")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--k-bound", type=int, default=16)
    cfg = SampleConfig(**vars(p.parse_args()))

    tally = sample(cfg)
    print(f"{cfg.count} certificates over {cfg.matrix}, seed {cfg.seed}")
    for key, n in sorted(tally.items()):
        print(f"  {key:<28} {n}")


if __name__ == "__main__":
    main()
