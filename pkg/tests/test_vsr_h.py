import random

import pytest
from hypothesis import given, settings, strategies as st

from vsr.field import P80, P251
from vsr.prims import Sha256Hash, ToyHash
from vsr.segmentation import FileRecord, SessionParams, segment_file
from vsr.verdict import Verdict
from vsr.vsr_h import (SavageSenderState, VsrHProof, VsrHSenderState, VsrHTag, proof_generate, proof_verify,
                       savage_proof_generate, savage_proof_verify, savage_tag_generate, tag_generate)

from conftest import bare_segment


class FixedBits:
    def __init__(self, value):
        self.value = value

    def getrandbits(self, k):
        return self.value


def test_toy_hash_worked_values():
    state = VsrHSenderState(ToyHash(P251))
    seg = bare_segment(1, bytes([60, 40]))
    tag = tag_generate(state, 1, seg, FixedBits(7))
    assert tag == VsrHTag(bytes([7]))
    assert state.lx[1].residue == 107
    other = bare_segment(2, bytes([100, 93]))
    tag2 = tag_generate(state, 2, other, FixedBits(7))
    assert state.lx[2].residue == 200
    proof = proof_generate([(seg, tag), (other, tag2)], state.hash)
    assert proof.value.residue == 56
    assert proof_verify(state, [1, 2], proof) is Verdict.ACCEPT


def test_empty_and_singleton():
    h = Sha256Hash(P80)
    state = VsrHSenderState(h)
    seg = bare_segment(1, b"abc")
    tag = tag_generate(state, 1, seg, random.Random(0))
    assert proof_generate([], h).value.residue == 0
    assert proof_generate([(seg, tag)], h).value == h(tag.r + seg.to_bytes())
    assert proof_verify(state, [], VsrHProof(P80.zero())) is Verdict.ACCEPT


def test_perturbation_unknown_index_and_duplicates():
    state = VsrHSenderState(Sha256Hash(P251))
    rng = random.Random(1)
    seg = bare_segment(1, b"x")
    tag = tag_generate(state, 1, seg, rng)
    good = proof_generate([(seg, tag)], state.hash)
    assert proof_verify(state, [1], good) is Verdict.ACCEPT
    assert proof_verify(state, [1], VsrHProof(good.value + P251.one())) is Verdict.REJECT
    assert proof_verify(state, [1, 2], good) is Verdict.UNKNOWN_INDEX
    with pytest.raises(ValueError):
        tag_generate(state, 1, seg, rng)


def test_fresh_tags_across_sessions():
    rng = random.Random(2)
    seg = bare_segment(1, b"same")
    tags = set()
    for _ in range(10_000):
        tags.add(tag_generate(VsrHSenderState(Sha256Hash(P80)), 1, seg, rng).r)
    assert len(tags) == 10_000


def test_savage_tags_alone_suffice():
    state = SavageSenderState(P251)
    rng = random.Random(3)
    tags = [savage_tag_generate(state, i, rng) for i in (1, 2, 3)]
    assert savage_proof_verify(state, [1, 2, 3], savage_proof_generate(tags, P251)) is Verdict.ACCEPT
    assert savage_proof_verify(state, [4], VsrHProof(P251.zero())) is Verdict.UNKNOWN_INDEX


def test_tags_alone_do_not_suffice_with_real_hash():
    # Holder of every tag but one segment's content: rate should sit near 1/N.
    rng = random.Random(4)
    wins, trials = 0, 20_000
    for _ in range(trials):
        state = VsrHSenderState(Sha256Hash(P251))
        segs = [bare_segment(i, rng.randbytes(8)) for i in (1, 2)]
        tags = [tag_generate(state, s.index, s, rng) for s in segs]
        forged = proof_generate([(segs[0], tags[0])], state.hash) + VsrHProof(P251.random(rng))
        wins += proof_verify(state, [1, 2], forged).accepted
    p0 = 1 / 251
    assert abs(wins / trials - p0) <= 3 * (p0 * (1 - p0) / trials) ** 0.5


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=3000), st.integers(min_value=1, max_value=600), st.data())
def test_correctness_and_additivity(size, l, data):
    rng = random.Random(size * 7919 + l)
    h = Sha256Hash(P80)
    state = VsrHSenderState(h)
    params = SessionParams.for_content(size, l)
    segs = segment_file(FileRecord(b"f", rng.randbytes(size)), params)
    pairs = {s.index: (s, tag_generate(state, s.index, s, rng)) for s in segs}
    I = data.draw(st.sets(st.integers(min_value=1, max_value=params.n)))
    I1 = {i for i in I if i % 2}
    I2 = I - I1
    p1 = proof_generate([pairs[i] for i in I1], h)
    p2 = proof_generate([pairs[i] for i in I2], h)
    whole = proof_generate([pairs[i] for i in I], h)
    assert whole == p1 + p2
    assert proof_verify(state, sorted(I), whole) is Verdict.ACCEPT
