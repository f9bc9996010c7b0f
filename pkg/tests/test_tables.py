import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slowbeams.tables import NonFiniteError, SeriesTable, read_csv, write_csv

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(finite, finite, finite), min_size=1, max_size=20))
def test_round_trip_is_exact(tmp_path_factory, rows):
    path = tmp_path_factory.mktemp("t") / "ramp.csv"
    table = SeriesTable("ramp", ("t_s", "T_K", "rate_cps"), rows)
    back = read_csv(write_csv(table, path))
    assert back == table


def test_schema_enforced():
    with pytest.raises(ValueError, match="needs columns"):
        SeriesTable("ramp", ("t", "T"), [(1.0, 2.0)])


def test_ragged_rows_rejected():
    with pytest.raises(ValueError, match="row 1"):
        SeriesTable("velocities", ("v_mps", "count"), [(1.0, 2.0), (1.0,)])


def test_nonfinite_rejected_on_write():
    with pytest.raises(NonFiniteError) as err:
        SeriesTable.from_columns("velocities", v_mps=[1.0, 2.0], count=[3.0, math.nan])
    assert err.value.column == "count"


def test_tampered_file_loads_for_inspection(tmp_path):
    path = write_csv(SeriesTable.from_columns("velocities", v_mps=[1.0, 2.0], count=[3, 4]),
                     tmp_path / "velocities.csv")
    path.write_text(path.read_text().replace("4.0000000000000000e+00", "nan"))
    with pytest.raises(NonFiniteError):
        read_csv(path)
    t = read_csv(path, allow_nonfinite=True)
    assert t.nonfinite_columns() == ["count"]


def test_text_column(tmp_path):
    t = SeriesTable.from_columns("enthalpy", molecule=["PcH2"], mass_amu=[514.5],
                                 dH_kJmol=[200.0], err_kJmol=[11.0])
    back = read_csv(write_csv(t, tmp_path / "enthalpy.csv"))
    assert back.column("molecule") == ["PcH2"]
    assert np.array_equal(back.column("dH_kJmol"), [200.0])


def test_unknown_header_is_raw(tmp_path):
    p = tmp_path / "velocities.csv"
    p.write_text("a,b\n1,2\n")
    assert read_csv(p).name == "velocities:raw"
