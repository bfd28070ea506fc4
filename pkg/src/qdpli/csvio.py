"""Deterministic CSV writing/reading: 9 significant digits, '.' decimal."""

import numpy as np

from .errors import ConfigError

__all__ = ["format_csv", "write_csv", "read_csv"]


def format_csv(header, columns):
    """Render columns to CSV text; bit-identical for identical input."""
    cols = [np.asarray(c, dtype=float) for c in columns]
    if len(cols) != len(header):
        raise ValueError("header/column count mismatch")
    n = cols[0].size
    if any(c.size != n for c in cols):
        raise ValueError("columns differ in length")
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(f"{c[i]:.9g}" for c in cols))
    return "\n".join(lines) + "\n"


def write_csv(path, header, columns):
    text = format_csv(header, columns)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text


def read_csv(path_or_text, from_text=False):
    """Parse a CSV produced by this tool; malformed rows name the line."""
    if from_text:
        text = path_or_text
    else:
        with open(path_or_text, "r", encoding="utf-8") as fh:
            text = fh.read()
    lines = [ln for ln in text.split("\n") if ln != ""]
    if not lines:
        raise ConfigError("empty CSV: no header row")
    header = lines[0].split(",")
    if len(lines) == 1:
        raise ConfigError("CSV has a header but no data rows")
    rows = []
    for idx, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(header):
            raise ConfigError(f"CSV row {idx}: expected {len(header)} "
                              f"fields, found {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise ConfigError(f"CSV row {idx}: {exc}") from exc
    return header, np.asarray(rows, dtype=float)
