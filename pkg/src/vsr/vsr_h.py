"""Hash-based receipt proofs and the random-nonce baseline they harden.

VSR-H: the sender tags segment i with a fresh random string r_i and remembers
x_i = h(r_i || s_i); the receiver proves receipt of I with sum h(t_i || s_i).
The baseline sends r_i mod N and accepts sum r_i, which needs no segment data
at all and is therefore broken by anyone who can read tags.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .field import FieldElement, Modulus, field_sum
from .segmentation import Segment
from .verdict import Verdict


@dataclass(frozen=True)
class VsrHTag:
    r: bytes

    def to_bytes(self) -> bytes:
        return self.r


@dataclass(frozen=True)
class VsrHProof:
    value: FieldElement

    def to_bytes(self) -> bytes:
        return self.value.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes, modulus: Modulus) -> VsrHProof:
        return cls(modulus.from_bytes(data))

    def __add__(self, other: VsrHProof) -> VsrHProof:
        return VsrHProof(self.value + other.value)


@dataclass
class VsrHSenderState:
    hash: object
    lx: dict[int, FieldElement] = field(default_factory=dict)

    @property
    def modulus(self) -> Modulus:
        return self.hash.modulus

    @property
    def tag_bits(self) -> int:
        return self.modulus.bit_length


def _hash_input(tag: VsrHTag, segment: Segment) -> bytes:
    return tag.r + segment.to_bytes()


def tag_generate(state: VsrHSenderState, i: int, segment: Segment, rng) -> VsrHTag:
    if i in state.lx:
        raise ValueError(f"segment {i} already tagged; retransmissions reuse the stored tag")
    bits = state.tag_bits
    tag = VsrHTag(rng.getrandbits(bits).to_bytes((bits + 7) // 8, "big"))
    state.lx[i] = state.hash(_hash_input(tag, segment))
    return tag


def proof_generate(pairs: Iterable[tuple[Segment, VsrHTag]], hash) -> VsrHProof:
    return VsrHProof(field_sum((hash(_hash_input(t, s)) for s, t in pairs), hash.modulus))


def proof_verify(state: VsrHSenderState, I: Iterable[int], proof: VsrHProof) -> Verdict:
    I = list(I)
    if any(i not in state.lx for i in I):
        return Verdict.UNKNOWN_INDEX
    expected = field_sum((state.lx[i] for i in I), state.modulus)
    return Verdict.ACCEPT if expected == proof.value else Verdict.REJECT


@dataclass(frozen=True)
class SavageTag:
    r: FieldElement

    def to_bytes(self) -> bytes:
        return self.r.to_bytes()


@dataclass
class SavageSenderState:
    modulus: Modulus
    nonces: dict[int, FieldElement] = field(default_factory=dict)


def savage_tag_generate(state: SavageSenderState, i: int, rng) -> SavageTag:
    if i in state.nonces:
        raise ValueError(f"segment {i} already tagged; retransmissions reuse the stored tag")
    r = state.modulus.random(rng)
    state.nonces[i] = r
    return SavageTag(r)


def savage_proof_generate(tags: Iterable[SavageTag], modulus: Modulus) -> VsrHProof:
    return VsrHProof(field_sum((t.r for t in tags), modulus))


def savage_proof_verify(state: SavageSenderState, I: Iterable[int], proof: VsrHProof) -> Verdict:
    I = list(I)
    if any(i not in state.nonces for i in I):
        return Verdict.UNKNOWN_INDEX
    expected = field_sum((state.nonces[i] for i in I), state.modulus)
    return Verdict.ACCEPT if expected == proof.value else Verdict.REJECT
