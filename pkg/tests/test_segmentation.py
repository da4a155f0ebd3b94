import pytest
from hypothesis import given, strategies as st

from vsr.segmentation import (HEADER_LEN, FileRecord, SessionParams, emulate_header, index_to_seq, load_catalog,
                              make_segment, segment_file, seq_to_index)


def test_padding_example():
    m = bytes(range(256)) * 4
    m = m[:1000]
    params = SessionParams.for_content(len(m), 536)
    segs = segment_file(FileRecord(b"f", m), params)
    assert params.n == 2
    assert segs[1].payload == m[536:] + bytes(72)
    assert len(m[536:]) == 464


def test_exact_fit_and_empty():
    params = SessionParams.for_content(536, 536)
    assert params.n == 1
    assert segment_file(FileRecord(b"f", bytes(536)), params)[0].payload == bytes(536)
    with pytest.raises(ValueError):
        SessionParams.for_content(0, 536)
    with pytest.raises(ValueError):
        SessionParams.for_content(10, 0)


def test_sequence_numbers():
    params = SessionParams(536, 3, isn=1000, offset=1)
    assert index_to_seq(1, params) == 1001
    assert index_to_seq(2, params) == 1537
    assert seq_to_index(1537, params) == 2
    for bad in (0, 4):
        with pytest.raises(ValueError):
            index_to_seq(bad, params)
    with pytest.raises(ValueError):
        seq_to_index(1002, params)


def test_header_binds_sequence_number():
    a = SessionParams(64, 2, isn=5)
    b = SessionParams(64, 2, isn=6)
    assert len(emulate_header(1, a)) == HEADER_LEN
    assert emulate_header(1, a) != emulate_header(1, b)
    assert len(make_segment(bytes(100), 2, a)) == HEADER_LEN + 64


def test_load_catalog(tmp_path):
    (tmp_path / "d").mkdir()
    (tmp_path / "a.bin").write_bytes(b"abc")
    (tmp_path / "d" / "b.bin").write_bytes(b"xyz")
    cat = load_catalog(tmp_path)
    assert sorted(cat) == [b"a.bin", b"d/b.bin"]


@given(st.integers(min_value=1, max_value=5000), st.integers(min_value=1, max_value=1460),
       st.integers(min_value=0, max_value=2**32 - 1))
def test_roundtrip_and_reassembly(size, l, isn):
    content = bytes((k * 7) % 256 for k in range(size))
    params = SessionParams.for_content(size, l, isn=isn)
    segs = segment_file(FileRecord(b"f", content), params)
    assert b"".join(s.payload for s in segs)[:size] == content
    for s in segs:
        assert seq_to_index(index_to_seq(s.index, params), params) == s.index
