"""Run an advantage grid and print one line per (protocol, adversary) cell.

Defaults to configs/advantage-grid.cfg (10^5 trials per cell at p = 251).
"""
import argparse
from pathlib import Path

from vsr.config import load_game
from vsr.game import run_game

DEFAULT = Path(__file__).resolve().parent.parent / "configs" / "advantage-grid.cfg"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", type=Path, default=DEFAULT)
    ap.add_argument("--trials", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--workers", type=int)
    args = ap.parse_args()
    grid = load_game(args.config, seed=args.seed, trials=args.trials)
    workers = args.workers or grid.workers
    print(f"{'protocol':12s} {'adversary':16s} {'notion':6s} {'adv':>9s}  {'3-sigma interval':>22s}")
    for config, adversary in grid.cells:
        res = run_game(config, adversary, workers=workers)
        lo, hi = res.interval()
        print(f"{config.protocol:12s} {adversary:16s} {config.notion:6s} {res.advantage:9.6f}  "
              f"[{lo:.6f}, {hi:.6f}]")


if __name__ == "__main__":
    main()
