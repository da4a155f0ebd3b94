"""Variants of the aggregate scheme that resist on-path eavesdroppers.

MAV: the sender multiplies each tag by g_i = f_{K_G}(i); a trusted
middle-address-verifier near the receiver, sharing K_G, divides it back out.
Tags captured between sender and verifier are useless without K_G.

RPK: the sender blinds each tag with PK^{r_i} (ElGamal style) and ships
u_i = g^{r_i}; only the holder of the private exponent s can compute
v_i = u_i^s = PK^{r_i} and unblind.

Blinding for RPK happens in the Diffie-Hellman group Z_P, which may be much
larger than the tag field Z_p.  An honest unblinded value is the field element
itself (it is smaller than p <= P), so it is reduced into Z_p afterwards.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import gmpy2

from .field import FieldElement, Modulus, field_sum, mod_inv, mod_mul, mod_pow
from .prims import MAV_KEY, MAV_RETRY, PrfKey, encode_index, make_prf
from .segmentation import Segment
from .vsr_aa import VsrAaKeys, VsrAaProof, VsrAaTag, authenticate, keygen, message_hash

# ---------------------------------------------------------------- MAV


@dataclass(frozen=True)
class MavKeys:
    base: VsrAaKeys
    K_G: PrfKey
    g: object  # PRF keyed with K_G, shared with the verifier

    @property
    def modulus(self) -> Modulus:
        return self.base.modulus


@dataclass(frozen=True)
class MavBlindedTag:
    t_blinded: FieldElement

    @property
    def value(self) -> FieldElement:
        return self.t_blinded

    def to_bytes(self) -> bytes:
        return self.t_blinded.to_bytes()


def mav_keygen(rng, p: Modulus, prf: str = "default-prf") -> MavKeys:
    base = keygen(rng, p, prf)
    K_G = PrfKey.random(rng, p.bit_length)
    return MavKeys(base, K_G, make_prf(prf, K_G, p))


def verifier_key(g, i: int) -> FieldElement:
    """g_i, re-derived with a retry counter until it is neither 0 (must
    invert) nor 1 (identity blinding would expose the tag)."""
    value = g(encode_index(MAV_KEY, i))
    retry = 0
    while value.residue in (0, 1):
        value = g(encode_index(MAV_RETRY, i, retry))
        retry += 1
    return value


def mav_blind(inner: FieldElement, g_i: FieldElement) -> MavBlindedTag:
    return MavBlindedTag(mod_mul(inner, g_i))


def mav_unblind(tag: MavBlindedTag, g_i: FieldElement) -> VsrAaTag:
    return VsrAaTag(mod_mul(tag.t_blinded, mod_inv(g_i)))


def mav_tag_generate(keys: MavKeys, i: int, segment: Segment) -> MavBlindedTag:
    return mav_blind(authenticate(keys.base, i, segment), verifier_key(keys.g, i))


def mav_process(g, i: int, pair: tuple[Segment, MavBlindedTag]) -> tuple[Segment, VsrAaTag]:
    segment, tag = pair
    return segment, mav_unblind(tag, verifier_key(g, i))


# ---------------------------------------------------------------- RPK


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class RpkGroup:
    """Safe-prime group P = 2q + 1.

    With ``strict`` the generator must have order q.  Non-strict groups only
    require g to generate a subgroup of order q or 2q; they exist for
    hand-sized worked examples such as P = 23, g = 5.
    """

    p: int
    q: int
    g: int
    strict: bool = True

    def __post_init__(self) -> None:
        if self.p != 2 * self.q + 1 or not gmpy2.is_prime(self.q) or not gmpy2.is_prime(self.p):
            raise GroupError(f"{self.p} is not a safe prime 2q+1 with q={self.q}")
        if self.g in (0, 1, self.p - 1) or not 1 < self.g < self.p:
            raise GroupError(f"degenerate generator {self.g}")
        if pow(self.g, self.q, self.p) != 1:
            if self.strict or pow(self.g, 2 * self.q, self.p) != 1:
                raise GroupError(f"g={self.g} does not have order q={self.q}")

    @cached_property
    def modulus(self) -> Modulus:
        return Modulus(self.p)

    @cached_property
    def generator(self) -> FieldElement:
        return FieldElement(self.g, self.modulus)


def generate_group(bits: int, rng) -> RpkGroup:
    """Random safe-prime group of the given size with an order-q generator."""
    if bits < 5:
        raise GroupError("group too small")
    while True:
        q = int(gmpy2.next_prime(rng.getrandbits(bits - 1) | (1 << (bits - 2))))
        p = 2 * q + 1
        if p.bit_length() == bits and gmpy2.is_prime(p):
            break
    while True:
        h = rng.randrange(2, p - 1)
        g = pow(h, 2, p)
        if g != 1:
            return RpkGroup(p, q, g)


_MODP_2048_HEX = (
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74020BBEA63B139B22514A08798E3404DD"
    "EF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF0598DA48361C55D39A69163FA8FD24CF5F"
    "83655D23DCA3AD961C62F356208552BB9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF6955817183995497CEA956AE515D2261898FA0510"
    "15728E5A8AACAA68FFFFFFFFFFFFFFFF"
)
_P2048 = int(_MODP_2048_HEX, 16)

# Production group: RFC 3526 group 14, where 2 has order q.
MODP_2048 = RpkGroup(_P2048, (_P2048 - 1) // 2, 2)
# Desk-scale groups, test mode only.  DESK_263 sits just above the 251 tag
# field so a wrongly unblinded value rarely reduces onto the right residue.
DESK_263 = RpkGroup(263, 131, 4)
DESK_64 = RpkGroup(18446744073709550147, 9223372036854775073, 4)
DESK_128 = RpkGroup(340282366920938463463374607431768196007, 170141183460469231731687303715884098003, 4)
TOY_23 = RpkGroup(23, 11, 5, strict=False)

GROUPS = {"modp2048": MODP_2048, "desk263": DESK_263, "desk64": DESK_64, "desk128": DESK_128, "toy23": TOY_23}


@dataclass(frozen=True)
class RpkKeypair:
    group: RpkGroup
    s: int
    PK: int

    def __post_init__(self) -> None:
        if not 1 <= self.s < self.group.q:
            raise GroupError("private exponent must lie in [1, q)")
        if pow(self.group.g, self.s, self.group.p) != self.PK:
            raise GroupError("PK != g^s")

    @property
    def public(self) -> tuple[RpkGroup, int]:
        return self.group, self.PK


def rpk_keygen(rng, group: RpkGroup, s: int | None = None) -> RpkKeypair:
    if s is None:
        s = rng.randrange(1, group.q)
    PK = mod_pow(group.generator, s).residue
    return RpkKeypair(group, s, PK)


@dataclass(frozen=True)
class RpkTaggedSegment:
    tag: FieldElement     # t_i in Z_P
    helper: FieldElement  # u_i = g^{r_i} in Z_P

    def to_bytes(self) -> bytes:
        return self.tag.to_bytes() + self.helper.to_bytes()


def rpk_tag_generate(keys: VsrAaKeys, receiver_pk: tuple[RpkGroup, int], i: int, segment: Segment,
                     rng, used: set[int] | None = None, r: int | None = None) -> RpkTaggedSegment:
    """Blind the aggregate tag under the receiver's public key.

    ``used`` is the session's freshness registry; a repeated r_i is refused.
    r_i comes from [1, q-1].
    """
    group, PK = receiver_pk
    G = group.modulus
    if keys.modulus.value > G.value:
        raise GroupError("the tag field must not exceed the blinding group")
    if r is None:
        r = rng.randrange(1, group.q)
        while used is not None and r in used:
            r = rng.randrange(1, group.q)
    elif used is not None and r in used:
        raise ValueError(f"r_i={r} already used in this session")
    if used is not None:
        used.add(r)
    inner = authenticate(keys, i, segment)
    u = mod_pow(group.generator, r)
    t = mod_mul(FieldElement(inner.residue, G), mod_pow(FieldElement(PK, G), r))
    return RpkTaggedSegment(t, u)


def rpk_unblind(s: int, item: RpkTaggedSegment, p: Modulus) -> FieldElement:
    v = mod_pow(item.helper, s)
    return p(mod_mul(item.tag, mod_inv(v)).residue)


def rpk_unblind_and_prove(s: int, items: Iterable[tuple[Segment, RpkTaggedSegment]], p: Modulus) -> VsrAaProof:
    items = list(items)
    x = field_sum((message_hash(seg, p) for seg, _ in items), p)
    y = field_sum((rpk_unblind(s, item, p) for _, item in items), p)
    return VsrAaProof(x, y)
