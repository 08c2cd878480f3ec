import json

import numpy as np
import pytest

from siptest.seriesio import (
    SeriesParseError,
    envelope_json,
    load_series,
    make_envelope,
    make_error_envelope,
    parse_csv,
    parse_plain,
)


class TestParsePlain:
    def test_basic(self):
        np.testing.assert_array_equal(
            parse_plain("1\n2.5\n-3e2\n"), [1.0, 2.5, -300.0]
        )

    def test_trailing_blank_lines_ignored(self):
        np.testing.assert_array_equal(parse_plain("1\n2\n\n\n"), [1.0, 2.0])

    def test_integral_values_parsed_as_reals(self):
        out = parse_plain("450\n451\n449\n")
        assert out.dtype == np.float64

    def test_interior_blank_line_rejected(self):
        with pytest.raises(SeriesParseError):
            parse_plain("1\n\n2\n")

    def test_non_numeric_rejected_with_line_number(self):
        with pytest.raises(SeriesParseError, match="line 2"):
            parse_plain("1\nbogus\n3\n")

    def test_non_finite_rejected(self):
        with pytest.raises(SeriesParseError):
            parse_plain("1\nnan\n")

    def test_empty_rejected(self):
        with pytest.raises(SeriesParseError):
            parse_plain("\n\n")


class TestParseCsv:
    def test_named_column(self):
        text = "time,current\n1,450\n2,451\n3,449\n"
        np.testing.assert_array_equal(
            parse_csv(text, column="current"), [450.0, 451.0, 449.0]
        )

    def test_single_column_auto_selected(self):
        np.testing.assert_array_equal(parse_csv("level\n1\n2\n"), [1.0, 2.0])

    def test_multiple_columns_require_choice(self):
        with pytest.raises(SeriesParseError, match="--column"):
            parse_csv("a,b\n1,2\n")

    def test_missing_column(self):
        with pytest.raises(SeriesParseError, match="no column"):
            parse_csv("a,b\n1,2\n", column="c")

    def test_bad_cell(self):
        with pytest.raises(SeriesParseError, match="row 3"):
            parse_csv("a\n1\nx\n", column="a")


class TestLoadSeries:
    def test_plain_file(self, tmp_path):
        path = tmp_path / "trace.txt"
        path.write_text("1\n2\n3\n")
        np.testing.assert_array_equal(load_series(str(path)), [1.0, 2.0, 3.0])

    def test_csv_file_by_extension(self, tmp_path):
        path = tmp_path / "trace.csv"
        path.write_text("current\n4\n5\n")
        np.testing.assert_array_equal(load_series(str(path)), [4.0, 5.0])

    def test_missing_file(self):
        with pytest.raises(SeriesParseError):
            load_series("/nonexistent/file.txt")


class TestEnvelope:
    def test_round_trip(self):
        payload = {"statistic": 1.25, "p_value": 0.5, "rho_hat": [0.01, -0.02]}
        env = make_envelope("test demo.txt", payload, warnings=["w1"])
        parsed = json.loads(envelope_json(env))
        assert parsed["schema"] == "sip-result/1"
        assert parsed["command"] == "test demo.txt"
        assert parsed["payload"] == payload
        assert parsed["warnings"] == ["w1"]
        assert "timestamp" in parsed

    def test_error_envelope(self):
        env = make_error_envelope("test x", "degenerate-variance", "boom")
        parsed = json.loads(envelope_json(env))
        assert parsed["error"]["code"] == "degenerate-variance"
        assert "payload" not in parsed
