"""Measured communication, storage and computation overhead.

Sizes come from serializing real tags and proofs; operation counts come from
running tag generation, proof generation and verification inside
:func:`vsr.field.counting`.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .field import Modulus, counting, modulus_for_lambda
from .mitm import GROUPS, rpk_keygen
from .schemes import RPK, make_scheme
from .segmentation import FileRecord, SessionParams, segment_file

COUNTER_KINDS = ("add", "mul", "inv", "pow", "prf", "hash", "length_match")


def smallest_group_for(modulus: Modulus) -> str:
    fits = [(g.p, name) for name, g in GROUPS.items() if g.strict and g.p >= modulus.value]
    if not fits:
        raise ValueError(f"no registered group holds a {modulus.bit_length}-bit field")
    return min(fits)[1]


@dataclass(frozen=True)
class OverheadReport:
    protocol: str
    lam: int
    modulus: int
    payload_len: int
    window: int
    tag_bytes: int
    proof_bytes: int
    storage_bytes: int
    tg_ops: dict[str, int]
    pg_ops: dict[str, int]
    pv_ops: dict[str, int]
    group: str | None = None
    seed: int = 0

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.tag_bytes, self.payload_len)

    def record(self) -> dict:
        return {
            "type": "overhead",
            "protocol": self.protocol,
            "lambda": self.lam,
            "modulus": self.modulus,
            "payload_len": self.payload_len,
            "window": self.window,
            "tag_bytes": self.tag_bytes,
            "proof_bytes": self.proof_bytes,
            "storage_bytes": self.storage_bytes,
            "ratio": f"{self.ratio.numerator}/{self.ratio.denominator}",
            "ratio_percent": round(100 * float(self.ratio), 4),
            "tg_per_segment": self.tg_ops,
            "pg_per_window": self.pg_ops,
            "pv_per_window": self.pv_ops,
            "group": self.group,
            "seed": self.seed,
        }


def _ops(counts) -> dict[str, int]:
    return {k: counts[k] for k in COUNTER_KINDS if counts[k]}


def measure(protocol: str, lam: int = 80, payload_len: int = 536, window: int = 16, seed: int = 0,
            group: str | None = None, modulus: Modulus | None = None) -> OverheadReport:
    """Tag a synthetic window of ``window`` full segments and prove/verify it once."""
    if window < 1 or payload_len < 1:
        raise ValueError("window and payload_len must be >= 1")
    p = modulus or modulus_for_lambda(lam)
    rng = random.Random(f"{seed}:overhead")
    kwargs = {}
    if protocol == RPK:
        group = group or smallest_group_for(p)
        kwargs["receiver"] = rpk_keygen(rng, GROUPS[group])
    else:
        group = None
    scheme = make_scheme(protocol, p, **kwargs)
    sender = scheme.new_sender(rng)
    params = SessionParams(payload_len, window, isn=rng.getrandbits(32), offset=1)
    segments = segment_file(FileRecord(b"synthetic", rng.randbytes(payload_len * window)), params)

    tags = []
    with counting() as tg:
        tags.append(sender.tag(1, segments[0]))
    tg_ops = _ops(tg)
    tags += [sender.tag(s.index, s) for s in segments[1:]]
    tag_bytes = {len(t.to_bytes()) for t in tags}
    assert len(tag_bytes) == 1, "tags must have a fixed wire size"

    items = [(s, scheme.receiver_view(sender, s.index, s, t)) for s, t in zip(segments, tags)]
    with counting() as pg:
        proof = scheme.prove(items)
    wire = proof.to_bytes()
    parsed = scheme.proof_from_bytes(wire)
    I = range(1, window + 1)
    with counting() as pv:
        verdict = sender.verify(I, parsed)
    if not verdict.accepted:
        raise RuntimeError(f"honest proof rejected while measuring {protocol}")
    return OverheadReport(protocol, p.bit_length, p.value, payload_len, window, tag_bytes.pop(), len(wire),
                          sender.storage_bytes(), tg_ops, _ops(pg), _ops(pv), group, seed)
