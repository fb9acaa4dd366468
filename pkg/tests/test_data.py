import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from aitest.data import ColumnRoles, Dataset, center, load_csv, write_csv
from aitest.errors import DataError


def _write(path, text):
    path.write_text(text)
    return path


def test_load_three_rows(tmp_path):
    p = _write(tmp_path / "d.csv", "x,y,z\n1,2,3\n4,5,6\n7,8,9\n")
    d = load_csv(p, ColumnRoles("x", "y", ("z",)))
    assert d.n == 3 and d.q == 0
    np.testing.assert_array_equal(d.x, [1, 4, 7])
    np.testing.assert_array_equal(d.z[:, 0], [3, 6, 9])


def test_load_keeps_row_order_and_ignores_extra_columns(tmp_path):
    p = _write(tmp_path / "d.csv", "a,z,y,x,w\n9,1,2,3,4\n9,5,6,7,8\n")
    d = load_csv(p, ColumnRoles("x", "y", ("z",), ("w",)))
    np.testing.assert_array_equal(d.x, [3, 7])
    np.testing.assert_array_equal(d.w[:, 0], [4, 8])
    assert d.w_names == ("w",)


def test_missing_column(tmp_path):
    p = _write(tmp_path / "d.csv", "x,y,z\n1,2,3\n")
    with pytest.raises(DataError, match="foo"):
        load_csv(p, ColumnRoles("x", "y", ("foo",)))


def test_non_numeric_cell_names_row_and_column(tmp_path):
    p = _write(tmp_path / "d.csv", "x,y,z\n1,2,3\n4,abc,6\n")
    with pytest.raises(DataError, match=r"row 2, column 'y'"):
        load_csv(p, ColumnRoles("x", "y", ("z",)))


def test_missing_value_rejected(tmp_path):
    p = _write(tmp_path / "d.csv", "x,y,z\n1,,3\n")
    with pytest.raises(DataError, match="row 1"):
        load_csv(p, ColumnRoles("x", "y", ("z",)))


def test_missing_file_and_empty_file(tmp_path):
    roles = ColumnRoles("x", "y", ("z",))
    with pytest.raises(DataError, match="no such file"):
        load_csv(tmp_path / "nope.csv", roles)
    with pytest.raises(DataError, match="empty"):
        load_csv(_write(tmp_path / "e.csv", ""), roles)
    with pytest.raises(DataError, match="no data rows"):
        load_csv(_write(tmp_path / "h.csv", "x,y,z\n"), roles)


def test_roles_must_be_disjoint_and_complete():
    with pytest.raises(DataError, match="more than one role"):
        ColumnRoles("x", "y", ("x",))
    with pytest.raises(DataError):
        ColumnRoles("x", "y", ())


def test_dataset_rejects_bad_shapes_and_nan():
    with pytest.raises(DataError, match="lengths"):
        Dataset(x=[1, 2], y=[1], z=[1, 2])
    with pytest.raises(DataError, match="non-finite"):
        Dataset(x=[1, np.nan], y=[1, 2], z=[1, 2])


def test_dataset_is_read_only():
    d = Dataset(x=[1.0, 2.0], y=[1.0, 2.0], z=[3.0, 4.0])
    with pytest.raises(ValueError):
        d.x[0] = 5.0


def test_center_examples():
    d = center(Dataset(x=[1.0, 2.0, 3.0], y=[0.0, 0.0, 3.0], z=[1.0, 1.0, 4.0]))
    np.testing.assert_allclose(d.x, [-1, 0, 1], atol=1e-15)
    single = center(Dataset(x=[5.0], y=[1.0], z=[2.0]))
    assert single.x[0] == 0.0


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(1, 40), elements=finite))
def test_center_zero_mean_and_idempotent(v):
    d = Dataset(x=v, y=v[::-1], z=v * 2)
    c = center(d)
    for orig, col in ((d.x, c.x), (d.y, c.y), (d.z, c.z)):
        # the bound scales with magnitude: a mean of 1e6-sized values carries ~1e-10 rounding
        assert abs(col.mean()) <= 1e-12 * (1 + np.abs(orig).max())
    cc = center(c)
    np.testing.assert_allclose(cc.x, c.x, atol=1e-12 * (1 + np.abs(v).max()))


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, (7, 5), elements=st.floats(-1e300, 1e300, allow_nan=False, allow_infinity=False)))
def test_csv_round_trip_is_exact(tmp_path_factory, table):
    d = Dataset(x=table[:, 0], y=table[:, 1], z=table[:, 2:4], w=table[:, 4:], w_names=("age",))
    p = tmp_path_factory.mktemp("rt") / "d.csv"
    write_csv(p, d)
    back = load_csv(p, ColumnRoles("X", "Y", d.z_names, d.w_names))
    for a, b in ((d.x, back.x), (d.y, back.y), (d.z, back.z), (d.w, back.w)):
        np.testing.assert_array_equal(a, b)
