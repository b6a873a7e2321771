import json
import logging
from csv import DictWriter
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, TextIO, Tuple, Union

from .errors import MixingError

# Bumped whenever a report layout changes
SCHEMA_VERSION = 1


class SchemaVersionError(MixingError):
    """Exception thrown when a report was written with another schema version"""


class CurveWriter(DictWriter):
    """Class that writes (N, bound) curves as CSV, one row per walk length"""

    file: TextIO

    csv_fieldnames = ["N", "bound"]

    def __init__(
        self,
        target: Union[str, Path, TextIO],
        extra_fields: Sequence[str] = (),
    ):
        self._owns_file = isinstance(target, (str, Path))
        if isinstance(target, (str, Path)):
            self.file = open(target, "w", newline="")
        else:
            self.file = target
        fieldnames = list(extra_fields) + self.csv_fieldnames

        super().__init__(self.file, fieldnames=fieldnames, dialect="excel")

        self.writeheader()
        self.file.flush()

    def close(self) -> None:
        if self._owns_file:
            self.file.close()

    def __enter__(self) -> "CurveWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def write(self, steps: int, bound: float, **extra: Any) -> None:
        """Write one point of the curve and flush it"""
        row = dict(extra)
        row["N"] = steps
        row["bound"] = repr(float(bound))
        len_written = self.writerow(row)
        logging.debug(f"CurveWriter wrote {len_written} bytes")

        self.file.flush()

    def write_curve(self, points: Iterable[Tuple[int, float]], **extra: Any) -> None:
        for steps, bound in points:
            self.write(steps, bound, **extra)


def with_schema(data: Dict[str, Any]) -> Dict[str, Any]:
    return {"schema_version": SCHEMA_VERSION, **data}


def dumps_report(data: Dict[str, Any]) -> str:
    return json.dumps(with_schema(data), indent=2) + "\n"


def write_report(data: Dict[str, Any], path: Optional[Union[str, Path]]) -> str:
    """Write a JSON report to path, or return it for printing when path is None"""
    text = dumps_report(data)
    if path is not None:
        with open(path, "w") as f:
            f.write(text)
        logging.info(f"Wrote report to {path}")
    return text


def read_report(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path) as f:
        data = json.load(f)
    version = data.get("schema_version") if isinstance(data, dict) else None
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"{path} has schema version {version}, expected {SCHEMA_VERSION}"
        )
    return data


def format_table(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Plain aligned text table for terminal output"""
    cells = [[str(h) for h in header]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
