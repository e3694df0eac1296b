"""Dataset types, schema parsing and CSV ingestion.

A mixed observation is a pair (z, u): z holds the continuous features and
u the binary location vector.  Categorical columns are expanded to full
one-hot indicators (no reference level dropped), missing categorical
entries become their own level, and missing continuous entries are
replaced by the column mean pooled over both classes.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

MISSING_LEVEL = "MISSING"

SCHEMA_KINDS = ("continuous", "categorical", "label")


class DataError(ValueError):
    """Malformed schema or CSV input."""


@dataclass(frozen=True)
class ColumnSchema:
    name: str
    kind: str
    levels: tuple[str, ...] = ()


@dataclass(frozen=True)
class MixedObservation:
    z: np.ndarray
    u: np.ndarray


@dataclass(frozen=True)
class MixedDataset:
    """Two labeled classes of paired (binary location, continuous feature) samples.

    z1/z2 are (n_i, p) float arrays, u1/u2 are (n_i, d) uint8 arrays with
    entries in {0, 1}.
    """

    z1: np.ndarray
    u1: np.ndarray
    z2: np.ndarray
    u2: np.ndarray
    labels: tuple[str, str] = ("1", "2")

    def __post_init__(self):
        z1 = np.atleast_2d(np.asarray(self.z1, dtype=float))
        z2 = np.atleast_2d(np.asarray(self.z2, dtype=float))
        u1 = np.atleast_2d(np.asarray(self.u1))
        u2 = np.atleast_2d(np.asarray(self.u2))
        if not (np.isin(u1, (0, 1)).all() and np.isin(u2, (0, 1)).all()):
            raise DataError("location entries must be 0 or 1")
        if not (np.isfinite(z1).all() and np.isfinite(z2).all()):
            raise DataError("continuous features must be finite")
        if z1.shape[1] != z2.shape[1] or u1.shape[1] != u2.shape[1]:
            raise DataError("classes disagree on p or d")
        if z1.shape[0] < 1 or z2.shape[0] < 1:
            raise DataError("each class needs at least one observation")
        if z1.shape[0] != u1.shape[0] or z2.shape[0] != u2.shape[0]:
            raise DataError("z/u row counts disagree")
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "z2", z2)
        object.__setattr__(self, "u1", u1.astype(np.uint8))
        object.__setattr__(self, "u2", u2.astype(np.uint8))

    @property
    def p(self) -> int:
        return self.z1.shape[1]

    @property
    def d(self) -> int:
        return self.u1.shape[1]

    @property
    def n1(self) -> int:
        return self.z1.shape[0]

    @property
    def n2(self) -> int:
        return self.z2.shape[0]

    def class_arrays(self, cls: int) -> tuple[np.ndarray, np.ndarray]:
        if cls == 1:
            return self.z1, self.u1
        if cls == 2:
            return self.z2, self.u2
        raise ValueError(f"class must be 1 or 2, got {cls}")

    def observations(self, cls: int):
        z, u = self.class_arrays(cls)
        return [MixedObservation(z=z[i], u=u[i]) for i in range(z.shape[0])]


def parse_schema(schema_text: str) -> list[ColumnSchema]:
    """Parse a schema file: one "name,kind" line per column."""
    columns = []
    for lineno, raw in enumerate(schema_text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = [x.strip() for x in line.split(",")]
        if len(parts) != 2 or not parts[0]:
            raise DataError(f"schema line {lineno}: expected 'name,kind', got {raw!r}")
        name, kind = parts
        if kind not in SCHEMA_KINDS:
            raise DataError(f"schema line {lineno}: unknown kind {kind!r}")
        columns.append(ColumnSchema(name=name, kind=kind))
    n_labels = sum(1 for c in columns if c.kind == "label")
    if n_labels != 1:
        raise DataError(f"schema must have exactly one label column, found {n_labels}")
    return columns


def _read_rows(csv_text: str, schema: list[ColumnSchema]) -> list[list[str]]:
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty CSV") from None
    names = [c.name for c in schema]
    if [h.strip() for h in header] != names:
        raise DataError(f"CSV header {header} does not match schema names {names}")
    rows = []
    for i, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(schema):
            raise DataError(f"row {i}: expected {len(schema)} fields, got {len(row)}")
        rows.append([x.strip() for x in row])
    if not rows:
        raise DataError("CSV has no data rows")
    return rows


def load_dataset(csv_text: str, schema: list[ColumnSchema]) -> MixedDataset:
    """Build a MixedDataset from CSV text following the given schema.

    The lexicographically smaller label becomes class 1.  Empty fields are
    missing: a missing categorical entry is one-hot encoded as its own
    level, a missing continuous entry is imputed with the column mean over
    non-missing rows pooled across both classes.
    """
    rows = _read_rows(csv_text, schema)
    label_idx = next(i for i, c in enumerate(schema) if c.kind == "label")
    labels = sorted({r[label_idx] for r in rows})
    if len(labels) != 2:
        raise DataError(f"label column must take exactly 2 values, found {labels}")

    z_cols: list[np.ndarray] = []
    u_cols: list[np.ndarray] = []
    for j, col in enumerate(schema):
        values = [r[j] for r in rows]
        if col.kind == "label":
            continue
        if col.kind == "continuous":
            x = np.array([float(v) if v != "" else np.nan for v in values])
            mask = np.isfinite(x)
            if not mask.any():
                raise DataError(f"continuous column {col.name!r} is entirely missing")
            x[~mask] = x[mask].mean()
            z_cols.append(x)
        else:
            levels: list[str] = []
            for v in values:
                lv = v if v != "" else MISSING_LEVEL
                if lv not in levels:
                    levels.append(lv)
            for lv in levels:
                u_cols.append(np.array(
                    [1 if (v if v != "" else MISSING_LEVEL) == lv else 0 for v in values],
                    dtype=np.uint8,
                ))

    z = np.column_stack(z_cols) if z_cols else np.zeros((len(rows), 0))
    u = np.column_stack(u_cols) if u_cols else np.zeros((len(rows), 0), dtype=np.uint8)
    is1 = np.array([r[label_idx] == labels[0] for r in rows])
    return MixedDataset(
        z1=z[is1], u1=u[is1], z2=z[~is1], u2=u[~is1],
        labels=(labels[0], labels[1]),
    )


def load_dataset_auto(csv_text: str, require_label: bool = True):
    """Ingest a self-schema'd CSV with columns u1..ud, z1..zp[, label].

    Location columns pass through as raw binary (no one-hot re-encoding).
    Returns a MixedDataset when a label column is present, otherwise the
    raw (u, z) arrays for prediction.
    """
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DataError("empty CSV") from None
    d = sum(1 for h in header if h.startswith("u") and h[1:].isdigit())
    p = sum(1 for h in header if h.startswith("z") and h[1:].isdigit())
    has_label = "label" in header
    expected = [f"u{i}" for i in range(1, d + 1)] + [f"z{i}" for i in range(1, p + 1)]
    if has_label:
        expected.append("label")
    if header != expected:
        raise DataError(f"auto-schema expects columns u1..ud,z1..zp[,label], got {header}")
    if require_label and not has_label:
        raise DataError("auto-schema CSV is missing the label column")

    rows = [r for r in reader if r]
    if not rows:
        raise DataError("CSV has no data rows")
    u = np.array([[int(float(r[i])) for i in range(d)] for r in rows], dtype=np.uint8)
    z = np.array([[float(r[d + i]) for i in range(p)] for r in rows])
    if not has_label:
        return u, z
    lab = [r[d + p] for r in rows]
    labels = sorted(set(lab))
    if len(labels) != 2:
        raise DataError(f"label column must take exactly 2 values, found {labels}")
    is1 = np.array([v == labels[0] for v in lab])
    return MixedDataset(z1=z[is1], u1=u[is1], z2=z[~is1], u2=u[~is1],
                        labels=(labels[0], labels[1]))


def dataset_to_csv(dataset: MixedDataset) -> str:
    """Serialize a dataset in the self-schema'd u1..ud,z1..zp,label layout."""
    d, p = dataset.d, dataset.p
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f"u{i}" for i in range(1, d + 1)] + [f"z{i}" for i in range(1, p + 1)] + ["label"])
    for cls, lab in ((1, dataset.labels[0]), (2, dataset.labels[1])):
        z, u = dataset.class_arrays(cls)
        for i in range(z.shape[0]):
            w.writerow([int(x) for x in u[i]] + [format(x, ".17g") for x in z[i]] + [lab])
    return out.getvalue()
