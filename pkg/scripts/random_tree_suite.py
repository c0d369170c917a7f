import argparse
import sys
import time

import numpy as np
from tqdm import tqdm

from tubular_tools.config import SuiteConfig
from tubular_tools.fixtures import random_tree
from tubular_tools.treebuild import CheckLevel, certify_virtually_special
from tubular_tools.utils import make_executor


def make_parser():
    parser = argparse.ArgumentParser(
        description="Certify random trees of tori and report how many pass every check.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--config", help="SuiteConfig JSON file; flags below override it.")
    parser.add_argument("--n-trees", type=int, help="Number of random trees.")
    parser.add_argument("--max-vertices", type=int, help="Largest tree size.")
    parser.add_argument("--seed", type=int, help="Random seed.")
    parser.add_argument("--expand-limit", type=int, help="Materialization limit for explicit wall checks.")
    parser.add_argument("--n-proc", type=int, dest="workers", help="Number of processes.")
    return parser


def certify_one(seed: int, max_vertices: int, entry_range: tuple[int, int], expand_limit: int):
    rng = np.random.default_rng(seed)
    g = random_tree(rng, int(rng.integers(1, max_vertices + 1)), entry_range)
    cert = certify_virtually_special(g, expand_limit=expand_limit)
    return seed, cert.status, cert.check_level


def main(argv=sys.argv[1:]):
    args = make_parser().parse_args(argv)
    if args.config:
        with open(args.config, "r") as f:
            cfg = SuiteConfig.model_validate_json(f.read())
    else:
        cfg = SuiteConfig()
    overrides = {k: v for k, v in vars(args).items() if k != "config" and v is not None}
    cfg = SuiteConfig.model_validate({**cfg.model_dump(), **overrides})

    seeds = np.random.default_rng(cfg.seed).integers(0, 2**31, size=cfg.n_trees)
    start = time.time()
    failures = []
    explicit = 0
    with make_executor(cfg.workers) as executor:
        futures = [executor.submit(certify_one, int(s), cfg.max_vertices, cfg.entry_range, cfg.expand_limit)
                   for s in seeds]
        for fut in tqdm(futures, desc="Trees"):
            seed, status, level = fut.result()
            if status != "certified":
                failures.append(seed)
            if level == CheckLevel.EXPLICIT:
                explicit += 1

    print(f"Certified {cfg.n_trees - len(failures)}/{cfg.n_trees} trees "
          f"({explicit} checked explicitly) in {time.time() - start:.1f}s")
    if failures:
        print(f"Failing seeds: {failures}")
        return 1
    print("Done!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
