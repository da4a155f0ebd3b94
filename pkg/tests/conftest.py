import random
import sys
from dataclasses import dataclass

import pytest

from vsr.field import FieldElement, Modulus, tally
from vsr.segmentation import HEADER_LEN, Segment


@dataclass
class TablePrf:
    """Fake PRF: k_i read from a table keyed by the segment index."""

    table: dict
    modulus: Modulus

    def __call__(self, data: bytes) -> FieldElement:
        tally("prf")
        return FieldElement(self.table[int.from_bytes(data[1:9], "big")] % self.modulus.value, self.modulus)


def bare_segment(i: int, payload: bytes) -> Segment:
    """Segment with an all-zero header, so its byte sum is the payload's."""
    return Segment(i, bytes(HEADER_LEN), payload)


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
