"""Rewrite tests/golden/<scenario>.txt from the bundled scenarios.

Run only after an intentional change to the simulator or a scenario, and
review the diff.
"""
import argparse
from pathlib import Path

from vsr.cli import bundled_scenarios
from vsr.config import load_scenario
from vsr.netsim import simulate

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=GOLDEN)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, path in sorted(bundled_scenarios().items()):
        text = simulate(load_scenario(path).sim).to_text()
        (args.out / f"{name}.txt").write_text(text)
        print(f"wrote {name}.txt ({len(text.splitlines())} lines)")


if __name__ == "__main__":
    main()
