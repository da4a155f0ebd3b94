"""Monte-Carlo over simulator seeds: how often is the first forged ack accepted?

Each bundled attack scenario is rerun with seeds 0..N-1.  For the wrong-key
scenario the first ack of each run is counted instead (every ack is forged
in effect, since the receiver cannot unblind).
"""
import argparse
import math

from vsr.cli import bundled_scenarios
from vsr.config import load_scenario
from vsr.netsim import simulate

ATTACKS = ["optimistic-ack-vsraa", "optimistic-ack-savage-ta", "mav-agent-sender-side",
           "mav-agent-receiver-side", "playback-vsraa", "rpk-wrong-key"]


def acceptance_rate(name: str, seeds: int) -> float:
    scenario = load_scenario(bundled_scenarios()[name])
    wins = 0
    for seed in range(seeds):
        scenario.sim.seed = seed
        report = simulate(scenario.sim)
        ack = report.acks[0] if scenario.sim.receiver_key == "wrong" else report.first_forged
        wins += ack is not None and ack.verdict == "accept"
    return wins / seeds


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=10_000)
    ap.add_argument("scenarios", nargs="*", default=ATTACKS)
    args = ap.parse_args()
    for name in args.scenarios:
        rate = acceptance_rate(name, args.seeds)
        sigma = math.sqrt(rate * (1 - rate) / args.seeds)
        print(f"{name:26s} accept={rate:.5f} +- {3 * sigma:.5f} (3 sigma, {args.seeds} seeds)")


if __name__ == "__main__":
    main()
