"""One interface over the five receipt schemes.

A :class:`Scheme` holds the public parameters (setup).  ``new_sender`` runs
key generation for a fresh session and returns a :class:`Sender` that tags
segments and verifies proofs.  Receivers call :meth:`Scheme.prove`.

Every proof in this family is a sum of per-segment contributions, so
:meth:`Scheme.contribution` lets an attacker build a proof from whatever it
actually holds: a missing segment or tag is replaced by a uniform guess of the
component that depends on it.
"""
from __future__ import annotations

import abc
from typing import Iterable, Sequence

from . import mitm, vsr_aa, vsr_h
from .field import Modulus
from .prims import make_hash
from .segmentation import Segment
from .verdict import Verdict

SAVAGE = "savage"
VSR_H = "vsr-h"
VSR_AA = "vsr-aa"
MAV = "vsr-aa-mav"
RPK = "vsr-aa-rpk"
SCHEME_NAMES = (SAVAGE, VSR_H, VSR_AA, MAV, RPK)


class Sender(abc.ABC):
    @abc.abstractmethod
    def tag(self, i: int, segment: Segment): ...

    @abc.abstractmethod
    def verify(self, I: Iterable[int], proof) -> Verdict: ...

    def storage_bytes(self) -> int:
        """Bytes of per-segment state kept for verification."""
        return 0


class Scheme(abc.ABC):
    name: str

    def __init__(self, modulus: Modulus):
        self.modulus = modulus

    @property
    def lam(self) -> int:
        return self.modulus.bit_length

    @abc.abstractmethod
    def new_sender(self, rng) -> Sender: ...

    @abc.abstractmethod
    def prove(self, items: Iterable[tuple[Segment, object]], *, key=None): ...

    @abc.abstractmethod
    def contribution(self, segment: Segment | None, tag, rng, *, key=None): ...

    @abc.abstractmethod
    def zero_proof(self): ...

    @abc.abstractmethod
    def random_proof(self, rng): ...

    @abc.abstractmethod
    def proof_from_bytes(self, data: bytes): ...

    def receiver_view(self, sender: Sender, i: int, segment: Segment, tag):
        """Tag as handed to the receiver after any on-path processing."""
        return tag

    def combine(self, proofs: Iterable) -> object:
        acc = self.zero_proof()
        for p in proofs:
            acc = acc + p
        return acc

    def __repr__(self) -> str:
        return f"{type(self).__name__}(p={self.modulus.value})"


# ------------------------------------------------------------ scalar proofs


class _ScalarProofs(Scheme):
    def zero_proof(self):
        return vsr_h.VsrHProof(self.modulus.zero())

    def random_proof(self, rng):
        return vsr_h.VsrHProof(self.modulus.random(rng))

    def proof_from_bytes(self, data: bytes):
        return vsr_h.VsrHProof.from_bytes(data, self.modulus)


class SavageSender(Sender):
    def __init__(self, modulus: Modulus, rng):
        self.state = vsr_h.SavageSenderState(modulus)
        self.rng = rng

    def tag(self, i, segment):
        return vsr_h.savage_tag_generate(self.state, i, self.rng)

    def verify(self, I, proof):
        return vsr_h.savage_proof_verify(self.state, I, proof)

    def storage_bytes(self):
        return len(self.state.nonces) * self.state.modulus.byte_length


class SavageScheme(_ScalarProofs):
    name = SAVAGE

    def new_sender(self, rng):
        return SavageSender(self.modulus, rng)

    def prove(self, items, *, key=None):
        return vsr_h.savage_proof_generate((t for _, t in items), self.modulus)

    def contribution(self, segment, tag, rng, *, key=None):
        if tag is None:
            return self.random_proof(rng)
        return vsr_h.VsrHProof(tag.r)


class VsrHSender(Sender):
    def __init__(self, hash, rng):
        self.state = vsr_h.VsrHSenderState(hash)
        self.rng = rng

    def tag(self, i, segment):
        return vsr_h.tag_generate(self.state, i, segment, self.rng)

    def verify(self, I, proof):
        return vsr_h.proof_verify(self.state, I, proof)

    def storage_bytes(self):
        return len(self.state.lx) * self.state.modulus.byte_length


class VsrHScheme(_ScalarProofs):
    name = VSR_H

    def __init__(self, modulus: Modulus, hash: str = "default-hash"):
        super().__init__(modulus)
        self.hash_name = hash
        self.hash = make_hash(hash, modulus)

    def new_sender(self, rng):
        return VsrHSender(self.hash, rng)

    def prove(self, items, *, key=None):
        return vsr_h.proof_generate(items, self.hash)

    def contribution(self, segment, tag, rng, *, key=None):
        if segment is None or tag is None:
            return self.random_proof(rng)
        return vsr_h.proof_generate([(segment, tag)], self.hash)


# ------------------------------------------------------------ (x, y) proofs


class _PairProofs(Scheme):
    def __init__(self, modulus: Modulus, prf: str = "default-prf"):
        super().__init__(modulus)
        self.prf_name = prf

    def zero_proof(self):
        return vsr_aa.VsrAaProof(self.modulus.zero(), self.modulus.zero())

    def random_proof(self, rng):
        return vsr_aa.VsrAaProof(self.modulus.random(rng), self.modulus.random(rng))

    def proof_from_bytes(self, data: bytes):
        return vsr_aa.VsrAaProof.from_bytes(data, self.modulus)

    def _x_part(self, segment, rng):
        if segment is None:
            return self.modulus.random(rng)
        return vsr_aa.message_hash(segment, self.modulus)

    def contribution(self, segment, tag, rng, *, key=None):
        x = self._x_part(segment, rng)
        y = tag.value if tag is not None else self.modulus.random(rng)
        return vsr_aa.VsrAaProof(x, y)


class VsrAaSender(Sender):
    def __init__(self, keys: vsr_aa.VsrAaKeys, cache: bool = False):
        self.keys = keys
        self.cache = vsr_aa.PrefixKeyCache(keys) if cache else None

    def tag(self, i, segment):
        return vsr_aa.tag_generate(self.keys, i, segment)

    def verify(self, I, proof):
        return vsr_aa.proof_verify(self.keys, I, proof, self.cache)


class VsrAaScheme(_PairProofs):
    name = VSR_AA

    def __init__(self, modulus: Modulus, prf: str = "default-prf", prefix_cache: bool = False):
        super().__init__(modulus, prf)
        self.prefix_cache = prefix_cache

    def new_sender(self, rng):
        return VsrAaSender(vsr_aa.keygen(rng, self.modulus, self.prf_name), self.prefix_cache)

    def prove(self, items, *, key=None):
        return vsr_aa.proof_generate(items, self.modulus)


class MavSender(VsrAaSender):
    def __init__(self, keys: mitm.MavKeys):
        super().__init__(keys.base)
        self.mav_keys = keys

    def tag(self, i, segment):
        return mitm.mav_tag_generate(self.mav_keys, i, segment)


class MavScheme(_PairProofs):
    name = MAV

    def new_sender(self, rng):
        return MavSender(mitm.mav_keygen(rng, self.modulus, self.prf_name))

    def receiver_view(self, sender, i, segment, tag):
        if isinstance(tag, mitm.MavBlindedTag):
            return mitm.mav_process(sender.mav_keys.g, i, (segment, tag))[1]
        return tag

    def prove(self, items, *, key=None):
        # Receivers behind the verifier hold unblinded tags; a blinded tag is
        # summed as-is, which is all an agent without K_G can do.
        items = [(s, t if isinstance(t, vsr_aa.VsrAaTag) else vsr_aa.VsrAaTag(t.value)) for s, t in items]
        return vsr_aa.proof_generate(items, self.modulus)


class RpkSender(VsrAaSender):
    def __init__(self, keys: vsr_aa.VsrAaKeys, receiver_pk, rng):
        super().__init__(keys)
        self.receiver_pk = receiver_pk
        self.rng = rng
        self.used: set[int] = set()

    def tag(self, i, segment):
        return mitm.rpk_tag_generate(self.keys, self.receiver_pk, i, segment, self.rng, self.used)


class RpkScheme(_PairProofs):
    name = RPK

    def __init__(self, modulus: Modulus, receiver: mitm.RpkKeypair, prf: str = "default-prf"):
        super().__init__(modulus, prf)
        if modulus.value > receiver.group.p:
            raise mitm.GroupError("the tag field must not exceed the blinding group")
        self.receiver = receiver

    @property
    def group(self) -> mitm.RpkGroup:
        return self.receiver.group

    def new_sender(self, rng):
        return RpkSender(vsr_aa.keygen(rng, self.modulus, self.prf_name), self.receiver.public, rng)

    def prove(self, items, *, key=None):
        s = self.receiver.s if key is None else key
        return mitm.rpk_unblind_and_prove(s, items, self.modulus)

    def contribution(self, segment, tag, rng, *, key=None):
        x = self._x_part(segment, rng)
        if tag is None or key is None:
            y = self.modulus.random(rng)
        else:
            y = mitm.rpk_unblind(key, tag, self.modulus)
        return vsr_aa.VsrAaProof(x, y)


def make_scheme(name: str, modulus: Modulus, *, prf: str = "default-prf", hash: str = "default-hash",
                receiver: mitm.RpkKeypair | None = None, group: mitm.RpkGroup | None = None,
                rng=None, prefix_cache: bool = False) -> Scheme:
    """Build a scheme by identifier.

    For RPK either pass the receiver keypair or a group plus an rng to draw one.
    """
    if name == SAVAGE:
        return SavageScheme(modulus)
    if name == VSR_H:
        return VsrHScheme(modulus, hash)
    if name == VSR_AA:
        return VsrAaScheme(modulus, prf, prefix_cache)
    if name == MAV:
        return MavScheme(modulus, prf)
    if name == RPK:
        if receiver is None:
            if group is None or rng is None:
                raise ValueError("RPK needs a receiver keypair or a group and an rng")
            receiver = mitm.rpk_keygen(rng, group)
        return RpkScheme(modulus, receiver, prf)
    raise ValueError(f"unknown scheme {name!r}; known: {', '.join(SCHEME_NAMES)}")

