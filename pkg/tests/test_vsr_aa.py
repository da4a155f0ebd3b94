import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from vsr.field import P80, P251, Modulus, counting
from vsr.prims import PrfKey
from vsr.segmentation import FileRecord, SessionParams, segment_file
from vsr.verdict import Verdict
from vsr.vsr_aa import (PrefixKeyCache, VsrAaKeys, VsrAaProof, keygen, message_hash, proof_generate, proof_verify,
                        tag_generate)

from conftest import TablePrf, bare_segment


def _keys(K, table, p=P251):
    return VsrAaKeys(p(K), PrfKey(b"\0" * p.byte_length, p.bit_length), TablePrf(table, p))


def test_worked_values():
    keys = _keys(3, {1: 20, 2: 40})
    s1, s2 = bare_segment(1, bytes([10])), bare_segment(2, bytes([20]))
    assert message_hash(s1, P251).residue == 10
    t1, t2 = tag_generate(keys, 1, s1), tag_generate(keys, 2, s2)
    assert (t1.t.residue, t2.t.residue) == (50, 100)
    proof = proof_generate([(s1, t1), (s2, t2)], P251)
    assert (proof.x.residue, proof.y.residue) == (30, 150)
    assert proof_verify(keys, [1, 2], proof) is Verdict.ACCEPT
    assert proof_verify(keys, [1, 2], VsrAaProof(P251(31), P251(150))) is Verdict.REJECT
    assert proof_verify(keys, [], VsrAaProof(P251.zero(), P251.zero())) is Verdict.ACCEPT
    assert proof_generate([], P251) == VsrAaProof(P251.zero(), P251.zero())


def test_degenerate_terms():
    keys = _keys(3, {1: 20, 2: 0})
    assert tag_generate(keys, 1, bare_segment(1, b"")).t.residue == 20
    assert tag_generate(keys, 2, bare_segment(2, bytes([10]))).t.residue == 30
    with pytest.raises(ValueError):
        _keys(0, {})


def test_keygen_determinism_and_spread():
    a = keygen(random.Random(5), P251)
    b = keygen(random.Random(5), P251)
    assert (a.K, a.K_prime) == (b.K, b.K_prime)
    draws = {(keygen(random.Random(f"k{j}"), P80).K.residue) for j in range(2000)}
    assert len(draws) == 2000


def test_wire_sizes_at_80_bits():
    keys = keygen(random.Random(6), P80)
    seg = bare_segment(1, bytes(536))
    tag = tag_generate(keys, 1, seg)
    proof = proof_generate([(seg, tag)], P80)
    assert len(tag.to_bytes()) == 10
    assert len(proof.to_bytes()) == 20
    assert VsrAaProof.from_bytes(proof.to_bytes(), P80) == proof


@pytest.mark.parametrize("p", [11, 13])
def test_exhaustive_under_determination(p):
    m = Modulus(p)
    for K in range(1, p):
        for k1 in range(p):
            keys = _keys(K, {1: k1}, m)
            accepting = [(x, y) for x, y in itertools.product(range(p), repeat=2)
                         if proof_verify(keys, [1], VsrAaProof(m(x), m(y))).accepted]
            assert len(accepting) == p
            assert sorted(x for x, _ in accepting) == list(range(p))


def test_prefix_cache_agrees_and_saves_prf_calls():
    keys = keygen(random.Random(7), P251)
    cache = PrefixKeyCache(keys)
    segs = [bare_segment(i, bytes([i])) for i in range(1, 33)]
    pairs = [(s, tag_generate(keys, s.index, s)) for s in segs]
    for I in ([1], list(range(1, 33)), list(range(5, 20)), [2, 9, 30]):
        proof = proof_generate([pairs[i - 1] for i in I], P251)
        assert proof_verify(keys, I, proof, cache) is proof_verify(keys, I, proof)
    with counting() as c:
        proof_verify(keys, list(range(1, 33)), proof_generate(pairs, P251), cache)
    assert c["prf"] == 0


def test_tag_access_does_not_beat_blind_guessing():
    # Paired comparison: same trials, one forger knows t_j, the other guesses it.
    rng = random.Random(8)
    trials, with_tag, blind = 20_000, 0, 0
    for _ in range(trials):
        keys = keygen(rng, P251)
        s1, s2 = bare_segment(1, rng.randbytes(4)), bare_segment(2, rng.randbytes(4))
        t1, t2 = tag_generate(keys, 1, s1), tag_generate(keys, 2, s2)
        known = proof_generate([(s1, t1)], P251)
        x_guess = P251.random(rng)
        with_tag += proof_verify(keys, [1, 2], known + VsrAaProof(x_guess, t2.t)).accepted
        blind += proof_verify(keys, [1, 2], known + VsrAaProof(x_guess, P251.random(rng))).accepted
    p0 = 1 / 251
    band = 3 * (p0 * (1 - p0) / trials) ** 0.5
    assert abs(with_tag / trials - p0) <= band
    assert abs(blind / trials - p0) <= band


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=4000), st.integers(min_value=1, max_value=700), st.data())
def test_correctness_and_linearity(size, l, data):
    rng = random.Random(size * 104729 + l)
    keys = keygen(rng, P80)
    params = SessionParams.for_content(size, l)
    segs = segment_file(FileRecord(b"f", rng.randbytes(size)), params)
    pairs = {s.index: (s, tag_generate(keys, s.index, s)) for s in segs}
    I = data.draw(st.sets(st.integers(min_value=1, max_value=params.n)))
    I1 = {i for i in I if i % 3 == 0}
    I2 = I - I1
    whole = proof_generate([pairs[i] for i in sorted(I)], P80)
    assert whole == proof_generate([pairs[i] for i in I1], P80) + proof_generate([pairs[i] for i in I2], P80)
    assert proof_verify(keys, sorted(I), whole) is Verdict.ACCEPT
