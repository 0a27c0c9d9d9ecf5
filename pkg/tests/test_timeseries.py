import numpy as np
import pytest

from rotorsmc import FormatError, NumericInputError, TimeSeries


def test_time_axis_and_duration():
    ts = TimeSeries(0.5, [0, 1, 2, 3], start_time=1.0)
    np.testing.assert_allclose(ts.t, [1.0, 1.5, 2.0, 2.5])
    assert ts.duration == 1.5
    assert len(ts) == 4


@pytest.mark.parametrize("dt,values", [(0.0, [1, 2]), (-1, [1, 2]), (0.1, [1.0])])
def test_rejects_bad_shape_or_step(dt, values):
    with pytest.raises(FormatError):
        TimeSeries(dt, values)


def test_rejects_non_finite():
    with pytest.raises(NumericInputError):
        TimeSeries(0.1, [0.0, np.nan])


def test_values_are_read_only():
    ts = TimeSeries(0.1, [0.0, 1.0])
    with pytest.raises(ValueError):
        ts.values[0] = 3.0


def test_csv_round_trip(tmp_path):
    ts = TimeSeries(0.02, np.sin(np.arange(50) * 0.1))
    path = tmp_path / "s.csv"
    text = ts.to_csv(path)
    assert text.splitlines()[0] == "t,value"
    assert text.splitlines()[1] == "0.000000,0.000000"
    back = TimeSeries.read_csv(path)
    assert back.dt == pytest.approx(0.02)
    np.testing.assert_allclose(back.values, ts.values, atol=1e-6)


def test_from_samples_rejects_non_uniform():
    with pytest.raises(FormatError):
        TimeSeries.from_samples([0.0, 0.1, 0.3], [1, 2, 3])


def test_read_csv_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,v\n0,1\n1,2\n")
    with pytest.raises(FormatError):
        TimeSeries.read_csv(path)
