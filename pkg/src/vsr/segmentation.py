"""File records, emulated TCP segments and index/sequence-number conversion."""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

HEADER_LEN = 40
_HEADER = struct.Struct("!HHI32x")
SEQ_SPACE = 2**32


@dataclass(frozen=True)
class FileRecord:
    fid: bytes
    content: bytes

    def __post_init__(self) -> None:
        if not self.fid:
            raise ValueError("fid must be nonempty")


@dataclass(frozen=True)
class SessionParams:
    segment_payload_len: int
    n: int
    isn: int = 0
    offset: int = 1
    src_port: int = 80
    dst_port: int = 40000

    def __post_init__(self) -> None:
        if self.segment_payload_len < 1:
            raise ValueError("segment payload length must be >= 1")
        if self.n < 1:
            raise ValueError("a session needs at least one segment")

    @classmethod
    def for_content(cls, size: int, l: int, **kw) -> SessionParams:
        if l < 1:
            raise ValueError("segment payload length must be >= 1")
        if size == 0:
            raise ValueError("empty transfers are rejected")
        return cls(l, -(-size // l), **kw)


@dataclass(frozen=True)
class Segment:
    index: int
    header: bytes
    payload: bytes

    def __post_init__(self) -> None:
        if len(self.header) != HEADER_LEN:
            raise ValueError("header must be 40 bytes")

    def to_bytes(self) -> bytes:
        return self.header + self.payload

    def __len__(self) -> int:
        return HEADER_LEN + len(self.payload)


def index_to_seq(i: int, params: SessionParams) -> int:
    if not 1 <= i <= params.n:
        raise ValueError(f"segment index {i} outside [1, {params.n}]")
    return (i - 1) * params.segment_payload_len + params.isn + params.offset


def seq_to_index(seq: int, params: SessionParams) -> int:
    delta = seq - params.isn - params.offset
    i, rem = divmod(delta, params.segment_payload_len)
    i += 1
    if rem or not 1 <= i <= params.n:
        raise ValueError(f"sequence number {seq} does not start a segment")
    return i


def emulate_header(i: int, params: SessionParams) -> bytes:
    seq = index_to_seq(i, params) % SEQ_SPACE
    return _HEADER.pack(params.src_port, params.dst_port, seq)


def make_segment(content: bytes, i: int, params: SessionParams) -> Segment:
    l = params.segment_payload_len
    payload = content[(i - 1) * l:i * l].ljust(l, b"\0")
    return Segment(i, emulate_header(i, params), payload)


def segment_file(file: FileRecord, params: SessionParams) -> list[Segment]:
    l = params.segment_payload_len
    if not file.content:
        raise ValueError("empty transfers are rejected")
    if params.n != -(-len(file.content) // l):
        raise ValueError(f"n={params.n} inconsistent with |M|={len(file.content)} and l={l}")
    return [make_segment(file.content, i, params) for i in range(1, params.n + 1)]


def load_catalog(root: str | Path) -> dict[bytes, FileRecord]:
    """Every regular file under ``root`` keyed by its relative path."""
    root = Path(root)
    catalog = {}
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        fid = path.relative_to(root).as_posix().encode()
        catalog[fid] = FileRecord(fid, path.read_bytes())
    return catalog
