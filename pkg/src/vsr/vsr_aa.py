"""Aggregate-authenticator receipt proofs.

Tag: t_i = K * h(s_i) + k_i (mod p), with k_i = f_{K'}(i).
Proof over I: (x, y) = (sum h(s_i), sum t_i).
Check: y == K_I + K * x where K_I = sum_{i in I} k_i.

The sender keeps no per-segment state; only (K, K') per session.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .field import FieldElement, Modulus, field_sum, mod_add, mod_mul
from .prims import PrfKey, length_match, make_prf, segment_key
from .segmentation import Segment
from .verdict import Verdict


@dataclass(frozen=True)
class VsrAaKeys:
    K: FieldElement
    K_prime: PrfKey
    f: object  # PRF instance keyed with K_prime

    def __post_init__(self) -> None:
        if self.K.residue == 0:
            raise ValueError("K must be nonzero")

    @property
    def modulus(self) -> Modulus:
        return self.K.modulus


@dataclass(frozen=True)
class VsrAaTag:
    t: FieldElement

    @property
    def value(self) -> FieldElement:
        return self.t

    def to_bytes(self) -> bytes:
        return self.t.to_bytes()


@dataclass(frozen=True)
class VsrAaProof:
    x: FieldElement
    y: FieldElement

    def __post_init__(self) -> None:
        if self.x.modulus != self.y.modulus:
            raise ValueError("x and y must share a modulus")

    def to_bytes(self) -> bytes:
        return self.x.to_bytes() + self.y.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes, modulus: Modulus) -> VsrAaProof:
        w = modulus.byte_length
        if len(data) != 2 * w:
            raise ValueError(f"expected {2 * w} bytes, got {len(data)}")
        return cls(modulus.from_bytes(data[:w]), modulus.from_bytes(data[w:]))

    def __add__(self, other: VsrAaProof) -> VsrAaProof:
        return VsrAaProof(self.x + other.x, self.y + other.y)


def keygen(rng, p: Modulus, prf: str = "default-prf") -> VsrAaKeys:
    K = p.random_nonzero(rng)
    K_prime = PrfKey.random(rng, p.bit_length)
    return VsrAaKeys(K, K_prime, make_prf(prf, K_prime, p))


def message_hash(segment: Segment, p: Modulus) -> FieldElement:
    return length_match(segment.to_bytes(), p)


def authenticate(keys: VsrAaKeys, i: int, segment: Segment) -> FieldElement:
    """K * h(s_i) + k_i, shared by the plain tag and both blinded variants."""
    return mod_add(mod_mul(keys.K, message_hash(segment, keys.modulus)), segment_key(keys.f, i))


def tag_generate(keys: VsrAaKeys, i: int, segment: Segment) -> VsrAaTag:
    return VsrAaTag(authenticate(keys, i, segment))


def proof_generate(pairs: Iterable[tuple[Segment, VsrAaTag]], p: Modulus) -> VsrAaProof:
    pairs = list(pairs)
    x = field_sum((message_hash(s, p) for s, _ in pairs), p)
    y = field_sum((t.t for _, t in pairs), p)
    return VsrAaProof(x, y)


class PrefixKeyCache:
    """Opt-in prefix sums of k_i so contiguous index sets cost O(1) PRF work.

    Not used by default; overhead measurements assume per-ack recomputation.
    """

    def __init__(self, keys: VsrAaKeys):
        self.keys = keys
        self._prefix = [0]

    def _extend(self, upto: int) -> None:
        p = self.keys.modulus.value
        while len(self._prefix) <= upto:
            i = len(self._prefix)
            self._prefix.append((self._prefix[-1] + segment_key(self.keys.f, i).residue) % p)

    def key_sum(self, I: Iterable[int]) -> FieldElement:
        I = sorted(set(I))
        p = self.keys.modulus
        if not I:
            return p.zero()
        if I[-1] - I[0] + 1 == len(I):
            self._extend(I[-1])
            return p(self._prefix[I[-1]] - self._prefix[I[0] - 1])
        return field_sum((segment_key(self.keys.f, i) for i in I), p)


def proof_verify(keys: VsrAaKeys, I: Iterable[int], proof: VsrAaProof,
                 cache: PrefixKeyCache | None = None) -> Verdict:
    p = keys.modulus
    if cache is not None:
        K_I = cache.key_sum(I)
    else:
        K_I = field_sum((segment_key(keys.f, i) for i in I), p)
    expected = mod_add(K_I, mod_mul(keys.K, proof.x))
    return Verdict.ACCEPT if expected == proof.y else Verdict.REJECT
