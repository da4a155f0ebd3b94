import random

from hypothesis import given, strategies as st
from scipy.stats import chisquare

from vsr.field import P80, P251, Modulus
from vsr.prims import (MAV_KEY, SEGMENT_KEY, HmacPrf, PrfKey, Sha256Hash, ToyHash, encode_index, length_match,
                       make_hash, make_prf, segment_key)


def _prf(seed, p=P251):
    return make_prf("default-prf", PrfKey.random(random.Random(seed), p.bit_length), p)


def test_determinism_and_domain_separation():
    f = _prf(1)
    assert segment_key(f, 7) == segment_key(f, 7)
    assert encode_index(SEGMENT_KEY, 7) != encode_index(MAV_KEY, 7)
    assert encode_index(SEGMENT_KEY, 1) == b"\x01" + (1).to_bytes(8, "big")


def test_prf_uniformity_chi_squared():
    f = _prf(2)
    counts = [0] * 251
    for i in range(1, 10_001):
        counts[segment_key(f, i).residue] += 1
    assert chisquare(counts).pvalue > 0.01


def test_prf_cross_key_collision_rate():
    # Independent keys conditioned on K1 != K2 (8-bit keys would otherwise
    # coincide 1/256 of the time).
    rng = random.Random(4)
    hits = 0
    for _ in range(10_000):
        k1 = PrfKey.random(rng, 8)
        k2 = k1
        while k2 == k1:
            k2 = PrfKey.random(rng, 8)
        hits += segment_key(HmacPrf(k1, P251), 1) == segment_key(HmacPrf(k2, P251), 1)
    rate, p0 = hits / 10_000, 1 / 251
    sigma = (p0 * (1 - p0) / 10_000) ** 0.5
    assert abs(rate - p0) <= 3 * sigma


def test_ideal_hash_no_collisions_at_80_bits():
    h = Sha256Hash(P80)
    rng = random.Random(3)
    outs = {h(rng.randbytes(64)) for _ in range(10_000)}
    assert len(outs) == 10_000


def test_toy_hash_hand_sum():
    assert ToyHash(P251)(bytes([50, 30, 20])).residue == 100


def test_length_match_examples():
    assert length_match(b"", P251).residue == 0
    assert length_match(bytes([10, 20, 30]), P251).residue == 60
    assert length_match(bytes([255]), P251).residue == 4


def test_length_match_unaligned_unit():
    # 5-bit units: 8 bits plus 2 pad bits give units 11111 and 00000
    m = Modulus(31)
    assert length_match(bytes([0b11111000]), m).residue == 0
    assert length_match(bytes([0b00001000]), m).residue == 1


def test_registries_reject_unknown_names():
    import pytest
    with pytest.raises(ValueError):
        make_prf("nope", PrfKey(b"\0", 8), P251)
    with pytest.raises(ValueError):
        make_hash("nope", P251)
    with pytest.raises(ValueError):
        PrfKey(b"\0\0", 8)


@given(st.binary(max_size=64), st.binary(max_size=64))
def test_length_match_linear_on_unit_aligned_split(a, b):
    assert length_match(a + b, P251) == length_match(a, P251) + length_match(b, P251)


@given(st.binary(max_size=40), st.binary(max_size=40))
def test_length_match_linear_at_80_bits(a, b):
    a = a[: len(a) // 10 * 10]
    assert length_match(a + b, P80) == length_match(a, P80) + length_match(b, P80)


@given(st.binary(max_size=200))
def test_outputs_are_canonical(data):
    f = HmacPrf(PrfKey(b"k" * 10, 80), P80)
    assert 0 <= f(data).residue < P80.value
    assert 0 <= Sha256Hash(P251)(data).residue < 251
