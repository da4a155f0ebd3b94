"""Command-line entry point: ``vsr demo | game | overhead | keygen``.

Every command writes line-delimited JSON under a versioned ``#`` header and
embeds the seed in its records.  Exit status: 0 on success (for ``demo``: the
scenario's declared expectation was met), 1 when a demo expectation fails,
2 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from importlib import resources
from pathlib import Path

from .config import Scenario, load_game, load_scenario, parse_game
from .field import modulus_for_lambda, parse_modulus
from .game import run_game
from .mitm import GROUPS, generate_group, mav_keygen, rpk_keygen
from .netsim import ConfigError, SimReport, simulate
from .overhead import measure, smallest_group_for
from .schemes import MAV, RPK, SCHEME_NAMES, VSR_AA
from .vsr_aa import keygen as aa_keygen

GAME_HEADER = "# vsr-gamereport v1"
OVERHEAD_HEADER = "# vsr-overhead v1"
KEYS_HEADER = "# vsr-keys v1"


class UsageError(Exception):
    pass


def bundled_scenarios() -> dict[str, Path]:
    root = resources.files("vsr") / "scenarios"
    return {Path(p.name).stem: Path(str(p)) for p in root.iterdir() if p.name.endswith(".cfg")}


def resolve_config(name: str) -> Path:
    p = Path(name)
    if p.is_file():
        return p
    bundled = bundled_scenarios()
    if name in bundled:
        return bundled[name]
    raise UsageError(f"config not found: {name}")


def _dump(records, header: str) -> str:
    lines = [header] + [json.dumps(r, sort_keys=True, separators=(",", ":")) for r in records]
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def outcome(report: SimReport) -> str:
    """Classify a run: attack-success, detection, complete, or the stall reason."""
    if report.forged_acks_accepted:
        return "attack-success"
    if report.terminated:
        return "detection"
    return report.termination_reason


def run_demo(scenario: Scenario, seed: int | None = None) -> SimReport:
    if seed is not None:
        scenario.sim.seed = seed
    return simulate(scenario.sim)


def cmd_demo(args) -> int:
    scenario = load_scenario(resolve_config(args.config))
    if args.trace:
        scenario.sim.trace = True
    report = run_demo(scenario, args.seed)
    result = outcome(report)
    _emit(report.to_text(), args.out)
    if args.trace:
        Path(args.trace).write_text("\n".join(report.trace) + "\n")
    expect = scenario.expect
    met = expect is None or expect == result
    print(f"{scenario.sim.name}: outcome={result} expect={expect or '-'} -> {'ok' if met else 'MISMATCH'}",
          file=sys.stderr)
    return 0 if met else 1


def cmd_game(args) -> int:
    if args.config:
        grid = load_game(resolve_config(args.config), seed=args.seed, trials=args.trials)
    elif args.protocol and args.adversary:
        lines = ["[game]", f"protocols = {args.protocol}", f"adversaries = {args.adversary}"]
        if args.modulus:
            lines.append(f"modulus = {args.modulus}")
        grid = parse_game("\n".join(lines), "<args>", seed=args.seed or 0, trials=args.trials or 100_000)
    else:
        raise UsageError("game needs --config, or --protocol with --adversary")
    cells = grid.cells
    if args.config and args.protocol:
        cells = [c for c in cells if c[0].protocol in args.protocol.split(",")]
    workers = args.workers or grid.workers
    records = []
    for config, adversary in cells:
        res = run_game(config, adversary, workers=workers)
        records.append(res.record())
        print(f"{config.protocol:12s} {adversary:16s} {config.notion:6s} adv={res.advantage:.6f} "
              f"({res.wins}/{res.trials})", file=sys.stderr)
    records.sort(key=lambda r: (r["protocol"], r["adversary"], r["notion"]))
    _emit(_dump(records, GAME_HEADER), args.out)
    return 0


def cmd_overhead(args) -> int:
    protocols = SCHEME_NAMES if args.protocol in (None, "all") else args.protocol.split(",")
    for p in protocols:
        if p not in SCHEME_NAMES:
            raise UsageError(f"unknown protocol {p!r}")
    if args.lam < 8:
        raise UsageError("--lambda must be >= 8")
    seed = args.seed or 0
    records = []
    for p in protocols:
        for w in args.window:
            records.append(measure(p, args.lam, args.payload, w, seed, group=args.group).record())
    _emit(_dump(records, OVERHEAD_HEADER), args.out)
    return 0


def cmd_keygen(args) -> int:
    seed = args.seed or 0
    rng = random.Random(f"{seed}:keygen")
    field = modulus_for_lambda(args.lam) if args.modulus is None else parse_modulus(args.modulus)
    proto = args.protocol or RPK
    records = []
    if proto == RPK:
        if args.group_bits:
            group = generate_group(args.group_bits, rng)
            name = f"generated-{args.group_bits}"
            records.append({"type": "rpk-group", "name": name, "p": str(group.p), "q": str(group.q),
                            "g": group.g, "seed": seed})
        else:
            name = args.group or smallest_group_for(field)
            group = GROUPS[name]
        if field.value > group.p:
            raise UsageError(f"group {name} is smaller than the {field.bit_length}-bit tag field")
        kp = rpk_keygen(rng, group)
        records.append({"type": "rpk-keypair", "group": name, "s": str(kp.s), "PK": str(kp.PK), "seed": seed})
    elif proto in (VSR_AA, MAV):
        keys = mav_keygen(rng, field) if proto == MAV else None
        base = keys.base if keys else aa_keygen(rng, field)
        rec = {"type": f"{proto}-keys", "modulus": str(field.value), "K": str(base.K.residue),
               "K_prime": base.K_prime.hex(), "seed": seed}
        if keys:
            rec["K_G"] = keys.K_G.hex()
        records.append(rec)
    else:
        raise UsageError(f"keygen supports {RPK}, {MAV} and {VSR_AA}")
    _emit(_dump(records, KEYS_HEADER), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vsr", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config_required=False):
        p.add_argument("--config", required=config_required,
                       help="config file, or the name of a bundled scenario")
        p.add_argument("--seed", type=int, default=None, help="master seed (overrides the config)")
        p.add_argument("--out", help="write records here instead of stdout")

    d = sub.add_parser("demo", help="simulate one scenario")
    common(d, config_required=True)
    d.add_argument("--trace", metavar="PATH", help="also write a human-readable event trace")
    d.set_defaults(func=cmd_demo)

    g = sub.add_parser("game", help="estimate adversary advantages")
    common(g)
    g.add_argument("--trials", type=int)
    g.add_argument("--protocol", help="comma-separated protocol ids")
    g.add_argument("--adversary", help="comma-separated adversary ids (without --config)")
    g.add_argument("--modulus", help="field modulus (without --config)")
    g.add_argument("--workers", type=int)
    g.set_defaults(func=cmd_game)

    o = sub.add_parser("overhead", help="measure sizes and operation counts")
    o.add_argument("--protocol", default="all")
    o.add_argument("--lambda", dest="lam", type=int, default=80)
    o.add_argument("--payload", type=int, default=536)
    o.add_argument("--window", type=int, nargs="+", default=[1, 4, 16, 64])
    o.add_argument("--group", choices=sorted(GROUPS))
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--out")
    o.set_defaults(func=cmd_overhead)

    k = sub.add_parser("keygen", help="emit key material for scenarios")
    k.add_argument("--protocol", default=RPK)
    k.add_argument("--lambda", dest="lam", type=int, default=8)
    k.add_argument("--modulus")
    k.add_argument("--group", choices=sorted(GROUPS))
    k.add_argument("--group-bits", type=int, help="generate a fresh safe-prime group of this size")
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--out")
    k.set_defaults(func=cmd_keygen)

    sub.add_parser("scenarios", help="list bundled scenarios").set_defaults(
        func=lambda a: print("\n".join(sorted(bundled_scenarios()))) or 0)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits 2
    except (ConfigError, FileNotFoundError) as exc:
        print(f"vsr: config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"vsr: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
