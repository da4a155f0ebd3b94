"""Keyed and unkeyed mappings into Z_p / Z_N.

* :class:`HmacPrf` is the default pseudorandom function (HMAC-SHA256, output
  expanded to at least ``bit_length + 64`` bits before reduction so the
  modular bias is negligible).
* :class:`Sha256Hash` stands in for the ideal hash of VSR-H.
* :class:`ToyHash` (byte sum mod N) exists only for hand-checkable examples and
  golden files.  Never use it in a security experiment.
* :func:`length_match` is the unkeyed map h used by the aggregate schemes.
"""
from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass
from typing import Callable, Protocol

from .field import FieldElement, Modulus, tally

# Domain-separation prefixes for PRF inputs.
SEGMENT_KEY = 0x01
MAV_KEY = 0x02
MAV_RETRY = 0x03


@dataclass(frozen=True)
class PrfKey:
    data: bytes
    bits: int

    def __post_init__(self) -> None:
        if len(self.data) != (self.bits + 7) // 8:
            raise ValueError(f"a {self.bits}-bit key needs {(self.bits + 7) // 8} bytes, got {len(self.data)}")

    @classmethod
    def random(cls, rng, bits: int) -> PrfKey:
        nbytes = (bits + 7) // 8
        value = rng.getrandbits(bits) if bits else 0
        return cls(value.to_bytes(nbytes, "big"), bits)

    def hex(self) -> str:
        return self.data.hex()


def encode_index(prefix: int, i: int, *extra: int) -> bytes:
    """PRF input: one prefix byte followed by 8-byte big-endian integers."""
    return bytes([prefix]) + b"".join(v.to_bytes(8, "big") for v in (i, *extra))


def _expand(digest: Callable[[bytes], bytes], data: bytes, out_bits: int) -> int:
    blocks = []
    have = 0
    counter = 0
    while have < out_bits:
        block = digest(counter.to_bytes(4, "big") + data)
        blocks.append(block)
        have += 8 * len(block)
        counter += 1
    return int.from_bytes(b"".join(blocks), "big")


class Prf(Protocol):
    key: PrfKey
    modulus: Modulus

    def __call__(self, data: bytes) -> FieldElement: ...


@dataclass(frozen=True)
class HmacPrf:
    key: PrfKey
    modulus: Modulus

    def __call__(self, data: bytes) -> FieldElement:
        tally("prf")
        key = self.key.data
        raw = _expand(lambda m: hmac.digest(key, m, "sha256"), data, self.modulus.bit_length + 64)
        return FieldElement(raw % self.modulus.value, self.modulus)


def prf_eval(f: Prf, data: bytes) -> FieldElement:
    return f(data)


def segment_key(f: Prf, i: int) -> FieldElement:
    return f(encode_index(SEGMENT_KEY, i))


@dataclass(frozen=True)
class Sha256Hash:
    modulus: Modulus

    def __call__(self, data: bytes) -> FieldElement:
        tally("hash")
        raw = _expand(lambda m: hashlib.sha256(m).digest(), data, self.modulus.bit_length + 64)
        return FieldElement(raw % self.modulus.value, self.modulus)


@dataclass(frozen=True)
class ToyHash:
    modulus: Modulus

    def __call__(self, data: bytes) -> FieldElement:
        tally("hash")
        return FieldElement(sum(data) % self.modulus.value, self.modulus)


def ideal_hash_eval(h, data: bytes) -> FieldElement:
    return h(data)


def length_match(payload: bytes, p: Modulus) -> FieldElement:
    """Split ``payload`` into |p|-bit units (last one right-padded with zero
    bits), reduce each mod p and sum."""
    tally("length_match")
    unit = p.bit_length
    if not payload:
        return p.zero()
    if unit % 8 == 0:
        step = unit // 8
        if step == 1:
            total = sum(payload)
        else:
            total = 0
            for k in range(0, len(payload), step):
                chunk = payload[k:k + step]
                total += int.from_bytes(chunk.ljust(step, b"\0"), "big")
    else:
        nbits = 8 * len(payload)
        pad = (-nbits) % unit
        value = int.from_bytes(payload, "big") << pad
        mask = (1 << unit) - 1
        total = 0
        for _ in range((nbits + pad) // unit):
            total += value & mask
            value >>= unit
    return FieldElement(total % p.value, p)


PRFS = {"default-prf": HmacPrf}
HASHES = {"default-hash": Sha256Hash, "toy-hash": ToyHash}


def make_prf(name: str, key: PrfKey, modulus: Modulus):
    try:
        return PRFS[name](key, modulus)
    except KeyError:
        raise ValueError(f"unknown PRF {name!r}; known: {sorted(PRFS)}") from None


def make_hash(name: str, modulus: Modulus):
    try:
        return HASHES[name](modulus)
    except KeyError:
        raise ValueError(f"unknown hash {name!r}; known: {sorted(HASHES)}") from None
