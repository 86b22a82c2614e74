import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypersystolic import CostModel, RegistryError, RingMachine


def test_unit_shift_example():
    m = RingMachine(4)
    m.put("B", ["b1", "b2", "b3", "b4"])
    m.cshift_row("B", 1)
    assert m.get("B").tolist() == ["b2", "b3", "b4", "b1"]
    assert m.log.shift_count == 1


def test_negative_stride_moves_the_other_way():
    m = RingMachine(4)
    m.put("B", [1, 2, 3, 4])
    m.cshift_row("B", -1)
    assert m.get("B").tolist() == [4, 1, 2, 3]


def test_cell_i_receives_from_cell_i_plus_k():
    p, k = 7, 3
    m = RingMachine(p)
    m.put("x", np.arange(1, p + 1))
    m.cshift_row("x", k)
    for i in range(1, p + 1):
        assert m.cell(i)["x"] == (i - 1 + k) % p + 1


def test_local_slot_layout_and_cell_view():
    m = RingMachine(3)
    m.put("A", [[1, 2], [3, 4], [5, 6]])
    assert m.cell(2)["A"].tolist() == [3, 4]
    assert list(m.cell(1)) == ["A"]
    with pytest.raises(IndexError):
        m.cell(0)


def test_unknown_handle_raises_registry_error():
    m = RingMachine(2)
    with pytest.raises(RegistryError):
        m.cshift_row("nope", 1)
    with pytest.raises(KeyError):
        m.get("nope")


def test_wrong_leading_axis_rejected():
    with pytest.raises(ValueError):
        RingMachine(3).put("x", [1, 2])


def test_cshift_col_rotates_slots_and_is_free():
    m = RingMachine(2)
    m.put("A", [[1, 2, 3], [4, 5, 6]])
    m.cshift_col("A", 1)
    assert m.get("A").tolist() == [[2, 3, 1], [5, 6, 4]]
    assert m.log.shift_count == 0


def test_row_subset_shift_logs_one_event():
    m = RingMachine(4)
    m.put("B", np.arange(16).reshape(4, 4))
    before = m.get("B").copy()
    m.cshift_row("B", -1, rows=[1, 3])
    after = m.get("B")
    assert np.array_equal(after[:, [0, 2]], before[:, [0, 2]])
    assert np.array_equal(after[:, [1, 3]], np.roll(before[:, [1, 3]], 1, axis=0))
    (e,) = m.log.entries
    assert (e.array, e.stride, e.elements) == ("B", -1, 2)


def test_out_leaves_source_untouched():
    m = RingMachine(3)
    m.put("x", [1, 2, 3])
    m.cshift_row("x", 1, out="y")
    assert m.get("x").tolist() == [1, 2, 3]
    assert m.get("y").tolist() == [2, 3, 1]


@given(p=st.integers(1, 12), a=st.integers(-30, 30), b=st.integers(-30, 30))
def test_shift_composition(p, a, b):
    m = RingMachine(p)
    m.put("x", np.arange(p))
    m.put("y", np.arange(p))
    m.cshift_row("x", a)
    m.cshift_row("x", b)
    m.cshift_row("y", a + b)
    assert np.array_equal(m.get("x"), m.get("y"))


@given(p=st.integers(1, 12), q=st.integers(-3, 3))
def test_stride_multiple_of_p_is_identity(p, q):
    m = RingMachine(p)
    m.put("x", np.arange(p))
    m.cshift_row("x", q * p)
    assert np.array_equal(m.get("x"), np.arange(p))
    assert m.log.entries[0].cost == 0


@settings(max_examples=30)
@given(p=st.integers(2, 10), strides=st.lists(st.integers(-20, 20), max_size=12))
def test_constant_cost_total_equals_count_of_nontrivial_shifts(p, strides):
    m = RingMachine(p, CostModel.constant())
    m.put("x", np.zeros(p))
    for s in strides:
        m.cshift_row("x", s)
    assert m.log.shift_count == len(strides)
    assert m.log.total_cost == sum(1 for s in strides if s % p)


def test_per_hop_cost_is_ring_distance():
    cm = CostModel.per_hop()
    assert [cm(s, 8) for s in (1, 3, 4, 5, 7, -1, -3)] == [1, 3, 4, 3, 1, 1, 3]


def test_table_cost_model():
    cm = CostModel.from_table({1: 1.0, 2: 1.5})
    assert cm(2, 8) == 1.5
    assert cm(-6, 8) == 1.5  # -6 and 2 are the same residue mod 8
    with pytest.raises(KeyError):
        cm(3, 8)


def test_map_cells_is_deterministic_and_one_based():
    m = RingMachine(4)
    m.zeros("c")
    seen = []

    def fn(i, c):
        seen.append(i)
        c[...] = 10 * i

    m.map_cells(["c"], fn)
    assert seen == [1, 2, 3, 4]
    assert m.get("c").tolist() == [10, 20, 30, 40]


def test_map_cells_is_atomic_on_failure():
    m = RingMachine(4)
    m.put("c", [1, 2, 3, 4])

    def fn(i, c):
        c[...] = -1
        if i == 3:
            raise RuntimeError("boom")

    with pytest.raises(RuntimeError):
        m.map_cells(["c"], fn)
    assert m.get("c").tolist() == [1, 2, 3, 4]


def test_phase_labels_entries():
    m = RingMachine(2)
    m.put("x", [1, 2])
    with m.phase("main"):
        m.cshift_row("x", 1)
    m.cshift_row("x", 1)
    assert [e.phase for e in m.log.entries] == ["main", ""]


def test_csv_export():
    m = RingMachine(4, CostModel.per_hop())
    m.put("A", np.zeros((4, 3)))
    m.cshift_row("A", 1)
    m.cshift_row("A", 2)
    rows = list(csv.reader(io.StringIO(m.log.to_csv())))
    assert rows[0] == ["step", "array", "stride", "elements", "cost"]
    assert rows[1][:4] == ["1", "A", "1", "3"]
    assert rows[2][:4] == ["2", "A", "2", "3"]
    assert rows[-1][0] == "TOTAL"
    assert float(rows[-1][4]) == 3
    assert int(rows[-1][3]) == 6
