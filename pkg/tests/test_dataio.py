import gzip

import numpy as np
import pytest

from roughscale.dataio import (
    MarketSeries,
    load_library_csv,
    normalize_symbol,
    save_library_csv,
    select_measure,
)
from roughscale.errors import DataError, SchemaError


def write(tmp_path, text, name="lib.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


BASIC = """date,Symbol,close_price,rv10
2001-03-05,.AEX,100.0,0.2
2001-03-06,.AEX,101.0,
2001-03-07,.AEX,102.0,0.4
2001-03-05,.SPX,50.0,0.1
2001-03-06,.SPX,51.0,0.15
2001-03-07,.SPX,52.5,0.2
"""


class TestLoader:
    def test_symbols_normalized(self, tmp_path):
        lib = load_library_csv(write(tmp_path, BASIC))
        assert set(lib) == {"AEX", "SPX"}
        assert normalize_symbol(".STOXX50E") == "STOXX50E"

    def test_interior_gap_interpolated_linearly(self, tmp_path):
        lib = load_library_csv(write(tmp_path, BASIC))
        np.testing.assert_allclose(lib["AEX"].rv10, [0.2, 0.3, 0.4])
        assert len(lib.repairs) == 1
        repair = lib.repairs[0]
        assert (repair.symbol, repair.column) == ("AEX", "rv10")
        assert repair.method == "interpolated"
        assert repair.value == pytest.approx(0.3)

    def test_date_distance_weights_interpolation(self, tmp_path):
        text = (
            "date,Symbol,rv10\n"
            "2001-03-05,X,0.2\n"
            "2001-03-06,X,\n"
            "2001-03-09,X,0.6\n"
        )
        lib = load_library_csv(write(tmp_path, text))
        # one day into a four-day gap
        assert lib["X"].rv10[1] == pytest.approx(0.3)

    def test_edge_gaps_take_nearest_value(self, tmp_path):
        text = (
            "date,Symbol,rv10\n"
            "2001-03-05,X,\n"
            "2001-03-06,X,0.5\n"
            "2001-03-07,X,0.7\n"
            "2001-03-08,X,\n"
        )
        lib = load_library_csv(write(tmp_path, text))
        np.testing.assert_allclose(lib["X"].rv10, [0.5, 0.5, 0.7, 0.7])
        assert [r.method for r in lib.repairs] == ["edge", "edge"]

    def test_day_month_year_dates(self, tmp_path):
        text = (
            "date,Symbol,close_price\n"
            "15/10/2012,BVLG,100.0\n"
            "16/10/2012,BVLG,101.0\n"
        )
        lib = load_library_csv(write(tmp_path, text))
        assert lib["BVLG"].dates[0] == np.datetime64("2012-10-15")

    def test_timezone_suffixed_iso_dates(self, tmp_path):
        text = (
            "Unnamed: 0,Symbol,close_price\n"
            "2000-01-03 00:00:00+00:00,.FTSE,100.0\n"
            "2000-01-04 00:00:00+00:00,.FTSE,101.0\n"
        )
        lib = load_library_csv(write(tmp_path, text))
        assert lib["FTSE"].dates[0] == np.datetime64("2000-01-03")

    def test_duplicate_dates_rejected(self, tmp_path):
        text = (
            "date,Symbol,close_price\n"
            "2001-03-05,X,1.0\n"
            "2001-03-05,X,2.0\n"
        )
        with pytest.raises(DataError, match="duplicate date"):
            load_library_csv(write(tmp_path, text))

    def test_unsorted_rows_are_ordered_by_date(self, tmp_path):
        text = (
            "date,Symbol,close_price\n"
            "2001-03-07,X,3.0\n"
            "2001-03-05,X,1.0\n"
            "2001-03-06,X,2.0\n"
        )
        lib = load_library_csv(write(tmp_path, text))
        np.testing.assert_allclose(lib["X"].close_price, [1.0, 2.0, 3.0])

    def test_missing_file(self):
        with pytest.raises(FileNotFoundError):
            load_library_csv("/nonexistent/file.csv")

    def test_no_measure_column(self, tmp_path):
        text = "date,Symbol,open_time\n2001-03-05,X,09:00\n"
        with pytest.raises(SchemaError, match="measure"):
            load_library_csv(write(tmp_path, text))

    def test_no_symbol_column(self, tmp_path):
        text = "date,close_price\n2001-03-05,1.0\n"
        with pytest.raises(SchemaError, match="symbol"):
            load_library_csv(write(tmp_path, text))

    def test_unparseable_date_reports_row(self, tmp_path):
        text = (
            "date,Symbol,close_price\n"
            "2001-03-05,X,1.0\n"
            "not-a-date,X,2.0\n"
        )
        with pytest.raises(DataError, match="date"):
            load_library_csv(write(tmp_path, text))

    def test_gzip_transparent(self, tmp_path):
        path = tmp_path / "lib.csv.gz"
        with gzip.open(path, "wt") as fh:
            fh.write(BASIC)
        lib = load_library_csv(path)
        assert set(lib) == {"AEX", "SPX"}


class TestSelectMeasure:
    def test_projection(self, tmp_path):
        lib = load_library_csv(write(tmp_path, BASIC))
        np.testing.assert_array_equal(
            select_measure(lib["SPX"], "close_price"), [50.0, 51.0, 52.5]
        )
        np.testing.assert_array_equal(select_measure(lib["SPX"], "rv10"),
                                      [0.1, 0.15, 0.2])

    def test_open_to_close_derived_from_prices(self, tmp_path):
        text = (
            "date,Symbol,open_price,close_price\n"
            "2001-03-05,X,100.0,101.0\n"
            "2001-03-06,X,101.0,103.0\n"
        )
        lib = load_library_csv(write(tmp_path, text))
        derived = select_measure(lib["X"], "open_to_close")
        np.testing.assert_allclose(
            derived, np.log([101.0 / 100.0, 103.0 / 101.0]), rtol=1e-12
        )

    def test_open_to_close_not_derivable(self, tmp_path):
        lib = load_library_csv(write(tmp_path, BASIC))
        with pytest.raises(SchemaError):
            select_measure(lib["AEX"], "open_to_close")

    def test_absent_measure(self, tmp_path):
        lib = load_library_csv(write(tmp_path, BASIC))
        with pytest.raises(SchemaError):
            select_measure(lib["AEX"], "bv")
        with pytest.raises(SchemaError):
            select_measure(lib["AEX"], "volume")


class TestRoundTrip:
    def test_save_load_bit_exact(self, tmp_path):
        rng = np.random.default_rng(5)
        dates = np.arange("2005-01-03", "2005-01-18", dtype="datetime64[D]")
        series = MarketSeries(
            symbol="TEST",
            dates=dates,
            close_price=np.exp(rng.standard_normal(dates.size) * 0.3 + 4.0),
            rv10=np.abs(rng.standard_normal(dates.size)) * 1e-4,
        )
        path = tmp_path / "roundtrip.csv"
        save_library_csv({"TEST": series}, path)
        lib = load_library_csv(path)
        assert len(lib.repairs) == 0
        np.testing.assert_array_equal(lib["TEST"].close_price, series.close_price)
        np.testing.assert_array_equal(lib["TEST"].rv10, series.rv10)
        np.testing.assert_array_equal(lib["TEST"].dates, series.dates)

    def test_complete_file_needs_no_repairs(self, tmp_path):
        text = BASIC.replace("101.0,\n", "101.0,0.3\n")
        lib = load_library_csv(write(tmp_path, text))
        assert lib.repairs == []
