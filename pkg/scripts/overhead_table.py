"""Print the measured overhead table (bytes and per-window operation counts)."""
import argparse

from vsr.overhead import measure
from vsr.schemes import SCHEME_NAMES


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda", dest="lam", type=int, default=80)
    ap.add_argument("--payload", type=int, default=536)
    ap.add_argument("--window", type=int, nargs="+", default=[1, 4, 16, 64])
    args = ap.parse_args()

    def ops(d):
        return " ".join(f"{k}={v}" for k, v in sorted(d.items())) or "-"

    print(f"{'protocol':12s} {'w':>3s} {'tag':>4s} {'proof':>5s} {'store':>6s} {'ratio%':>7s}  PV ops | PG ops")
    for p in SCHEME_NAMES:
        for w in args.window:
            r = measure(p, args.lam, args.payload, w)
            print(f"{p:12s} {w:3d} {r.tag_bytes:4d} {r.proof_bytes:5d} {r.storage_bytes:6d} "
                  f"{100 * float(r.ratio):7.4f}  {ops(r.pv_ops)} | {ops(r.pg_ops)}")


if __name__ == "__main__":
    main()
