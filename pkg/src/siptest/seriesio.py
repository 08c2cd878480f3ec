"""Series-file parsing and the versioned result envelope.

Two input formats are supported: plain text with one number per line
(trailing blank lines are ignored) and CSV with a named column.  Values
are always parsed as reals, even when they look integral, since raw
traces are frequently quantised to integer levels.

Command results are wrapped in a JSON envelope carrying the stable
schema tag "sip-result/1", an echo of the command, a timestamp and a
warnings list; the payload round-trips through JSON unchanged.
"""

import csv
import io
import json
from datetime import datetime, timezone

import numpy as np

RESULT_SCHEMA = "sip-result/1"


class SeriesParseError(ValueError):
    """The input file could not be parsed into a finite numeric series."""


def parse_plain(text: str, path: str = "<input>") -> np.ndarray:
    lines = text.split("\n")
    while lines and lines[-1].strip() == "":
        lines.pop()
    if not lines:
        raise SeriesParseError(f"{path}: no values found")
    values = np.empty(len(lines))
    for i, line in enumerate(lines):
        try:
            values[i] = float(line)
        except ValueError:
            raise SeriesParseError(
                f"{path}: line {i + 1} is not a number: {line.strip()!r}"
            ) from None
    if not np.all(np.isfinite(values)):
        raise SeriesParseError(f"{path}: series contains non-finite values")
    return values


def parse_csv(text: str, column: str | None = None, path: str = "<input>") -> np.ndarray:
    reader = csv.DictReader(io.StringIO(text))
    if not reader.fieldnames:
        raise SeriesParseError(f"{path}: empty CSV file")
    if column is None:
        if len(reader.fieldnames) == 1:
            column = reader.fieldnames[0]
        else:
            raise SeriesParseError(
                f"{path}: multiple columns {reader.fieldnames}; pick one with --column"
            )
    if column not in reader.fieldnames:
        raise SeriesParseError(f"{path}: no column named {column!r}")
    values = []
    for i, row in enumerate(reader):
        cell = row[column]
        if cell is None or (cell.strip() == "" and all(
            (v or "").strip() == "" for v in row.values()
        )):
            continue  # ignore blank row
        try:
            values.append(float(cell))
        except (TypeError, ValueError):
            raise SeriesParseError(
                f"{path}: row {i + 2} column {column!r} is not a number: {cell!r}"
            ) from None
    if not values:
        raise SeriesParseError(f"{path}: column {column!r} holds no values")
    out = np.asarray(values)
    if not np.all(np.isfinite(out)):
        raise SeriesParseError(f"{path}: series contains non-finite values")
    return out


def load_series(path: str, column: str | None = None) -> np.ndarray:
    """Read a series file, choosing the format from the extension."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SeriesParseError(f"{path}: {exc.strerror or exc}") from None
    if str(path).lower().endswith(".csv"):
        return parse_csv(text, column=column, path=str(path))
    return parse_plain(text, path=str(path))


def make_envelope(command: str, payload: dict, warnings: list[str] | None = None) -> dict:
    return {
        "schema": RESULT_SCHEMA,
        "command": command,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "payload": payload,
        "warnings": list(warnings or []),
    }


def make_error_envelope(command: str, code: str, message: str) -> dict:
    return {
        "schema": RESULT_SCHEMA,
        "command": command,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "error": {"code": code, "message": message},
    }


def envelope_json(envelope: dict) -> str:
    return json.dumps(envelope, sort_keys=True, indent=2) + "\n"
