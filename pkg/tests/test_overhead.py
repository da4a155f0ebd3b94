from fractions import Fraction

import pytest

from vsr.overhead import measure, smallest_group_for
from vsr.field import P80, P251


def test_reference_sizes_at_80_bits():
    aa = measure("vsr-aa", 80, 536)
    h = measure("vsr-h", 80, 536)
    assert aa.tag_bytes == h.tag_bytes == 10
    assert aa.ratio == Fraction(10, 536)
    assert round(100 * float(aa.ratio), 2) == 1.87 and abs(100 * float(aa.ratio) - 1.86) < 0.01
    assert (h.proof_bytes, aa.proof_bytes) == (10, 20)


@pytest.mark.parametrize("w", [1, 4, 16, 64])
def test_counter_shapes(w):
    h, aa = measure("vsr-h", 80, 536, w), measure("vsr-aa", 80, 536, w)
    assert h.pv_ops == ({"add": w - 1} if w > 1 else {})
    assert h.pg_ops == {"hash": w, **({"add": w - 1} if w > 1 else {})}
    assert h.storage_bytes == 10 * w
    assert aa.pv_ops == {"prf": w, "add": w, "mul": 1}
    assert aa.pg_ops.get("add", 0) == 2 * (w - 1)
    assert aa.tg_ops == {"prf": 1, "add": 1, "mul": 1, "length_match": 1}
    assert aa.storage_bytes == 0


def test_rpk_group_choice_and_record():
    assert smallest_group_for(P251) == "desk263"
    assert smallest_group_for(P80) == "desk128"
    rec = measure("vsr-aa-rpk", 80, 536, 2, seed=3).record()
    assert rec["group"] == "desk128" and rec["tag_bytes"] == 32 and rec["seed"] == 3


def test_rejects_bad_window():
    with pytest.raises(ValueError):
        measure("vsr-aa", 80, 536, 0)
