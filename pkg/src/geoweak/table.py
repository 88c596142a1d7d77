"""Tabular experiment results with a lossless CSV representation.

Layout on disk:

    # artifact_version: 0.1.0
    # timestamp: 2026-01-01T00:00:00+00:00
    # config: {"kind": ...}
    col_a,col_b,status
    1.5,0.25,ok
    ...

Metadata lives in leading ``# key: value`` comment lines; everything from
the header row down is the *body*, which is byte-identical across runs of
the same config and seed.  Numeric cells are written with 17 significant
digits so doubles round-trip exactly; NaN/Inf cells are rejected (degenerate
samples carry a non-"ok" status instead).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

STATUS_OK = "ok"


@dataclass
class ResultTable:
    """Named numeric columns plus one status string per row."""

    columns: list[str]
    rows: list[list[float]] = field(default_factory=list)
    status: list[str] = field(default_factory=list)
    metadata: dict[str, str] = field(default_factory=dict)

    def append(self, values, status: str = STATUS_OK):
        values = [float(v) for v in values]
        if len(values) != len(self.columns):
            raise ValueError(
                f"row has {len(values)} cells, table has {len(self.columns)} columns"
            )
        for v in values:
            if math.isnan(v) or math.isinf(v):
                raise ValueError("NaN/Inf cells are not allowed; flag the row instead")
        self.rows.append(values)
        self.status.append(str(status))

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list[float]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def body(self) -> str:
        """CSV header plus data rows (metadata excluded); deterministic."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns + ["status"])
        for row, st in zip(self.rows, self.status):
            writer.writerow([f"{v:.17g}" for v in row] + [st])
        return buf.getvalue()

    def dumps(self) -> str:
        lines = [f"# {key}: {value}" for key, value in self.metadata.items()]
        prefix = "\n".join(lines) + "\n" if lines else ""
        return prefix + self.body()

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "ResultTable":
        metadata: dict[str, str] = {}
        lines = text.splitlines()
        at = 0
        while at < len(lines) and lines[at].startswith("#"):
            entry = lines[at][1:].strip()
            key, _, value = entry.partition(":")
            metadata[key.strip()] = value.strip()
            at += 1
        reader = csv.reader(lines[at:])
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("missing CSV header row") from None
        if not header or header[-1] != "status":
            raise ValueError("last CSV column must be 'status'")
        table = cls(columns=header[:-1], metadata=metadata)
        for record in reader:
            if not record:
                continue
            table.append([float(v) for v in record[:-1]], status=record[-1])
        return table

    @classmethod
    def load(cls, path) -> "ResultTable":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.loads(fh.read())
