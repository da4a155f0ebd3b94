import random

import pytest
from hypothesis import given, settings, strategies as st

from vsr.field import P80, P251
from vsr.mitm import DESK_128, DESK_263, rpk_keygen
from vsr.schemes import MAV, RPK, SAVAGE, SCHEME_NAMES, VSR_AA, VSR_H, make_scheme
from vsr.segmentation import FileRecord, SessionParams, segment_file
from vsr.verdict import Verdict


def _scheme(name, p, rng):
    group = DESK_263 if p == P251 else DESK_128
    return make_scheme(name, p, group=group, rng=rng)


@pytest.mark.parametrize("name", SCHEME_NAMES)
@pytest.mark.parametrize("p", [P251, P80])
def test_honest_session_and_serialization(name, p):
    rng = random.Random(name)
    scheme = _scheme(name, p, rng)
    sender = scheme.new_sender(rng)
    params = SessionParams.for_content(3000, 500, isn=rng.getrandbits(32))
    segs = segment_file(FileRecord(b"f", rng.randbytes(3000)), params)
    items = [(s, scheme.receiver_view(sender, s.index, s, sender.tag(s.index, s))) for s in segs]
    proof = scheme.prove(items)
    assert sender.verify(range(1, 7), scheme.proof_from_bytes(proof.to_bytes())) is Verdict.ACCEPT
    assert scheme.combine([scheme.prove(items[:2]), scheme.prove(items[2:])]) == proof
    assert sender.verify([], scheme.zero_proof()) is Verdict.ACCEPT


def test_unknown_ids_and_rpk_requirements():
    with pytest.raises(ValueError):
        make_scheme("nope", P251)
    with pytest.raises(ValueError):
        make_scheme(RPK, P251)


def test_storage():
    rng = random.Random(1)
    for name, per in ((SAVAGE, 10), (VSR_H, 10), (VSR_AA, 0), (MAV, 0)):
        scheme = make_scheme(name, P80)
        sender = scheme.new_sender(rng)
        for s in segment_file(FileRecord(b"f", bytes(64 * 5)), SessionParams(64, 5)):
            sender.tag(s.index, s)
        assert sender.storage_bytes() == 5 * per


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([VSR_H, VSR_AA, MAV, RPK]), st.integers(min_value=1, max_value=5000),
       st.integers(min_value=64, max_value=1460), st.data())
def test_honest_proofs_over_random_received_sets(name, size, l, data):
    rng = random.Random(f"{name}:{size}:{l}")
    scheme = make_scheme(name, P80, group=DESK_128, rng=rng)
    sender = scheme.new_sender(rng)
    params = SessionParams.for_content(size, l, isn=rng.getrandbits(32))
    segs = segment_file(FileRecord(b"f", rng.randbytes(size)), params)
    lost = data.draw(st.sets(st.integers(min_value=1, max_value=params.n)))
    received = [(s, scheme.receiver_view(sender, s.index, s, sender.tag(s.index, s)))
                for s in segs if s.index not in lost]
    I = [s.index for s, _ in received]
    assert sender.verify(I, scheme.prove(received)) is Verdict.ACCEPT
