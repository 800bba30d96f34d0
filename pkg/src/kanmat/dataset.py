"""Columnar dataset: CSV ingestion, column transforms, max-min normalization.

A :class:`Dataset` is an immutable value: every transform returns a new
dataset with the applied :class:`TransformSpec` appended to its history, so
replaying the history on the source CSV reproduces the result bit-exactly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import ConstantColumnError, CsvParseError, KanmatError, TransformError

NA_TOKENS = frozenset({"", "NA", "NaN"})

TRANSFORM_KINDS = ("drop", "lag", "log", "subtract_mean", "subtract_group_mean")


@dataclass(frozen=True)
class TransformSpec:
    """One column transform; ``k`` is lag-only, ``floor`` log-only,
    ``group_by`` group-mean-only."""

    kind: str
    column: str
    k: int = 0
    floor: float = 1e-6
    group_by: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in TRANSFORM_KINDS:
            raise TransformError(f"unknown transform kind {self.kind!r}")
        if self.kind == "lag" and self.k < 1:
            raise TransformError("lag requires k >= 1")
        if self.kind == "log" and self.floor < 0:
            raise TransformError("log floor must be >= 0")
        object.__setattr__(self, "group_by", tuple(self.group_by))

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "column": self.column}
        if self.kind == "lag":
            d["k"] = self.k
        if self.kind == "log":
            d["floor"] = self.floor
        if self.kind == "subtract_group_mean":
            d["group_by"] = list(self.group_by)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TransformSpec":
        return cls(
            kind=d["kind"],
            column=d["column"],
            k=int(d.get("k", 0)),
            floor=float(d.get("floor", 1e-6)),
            group_by=tuple(d.get("group_by", ())),
        )

    def to_op_string(self) -> str:
        if self.kind == "lag":
            return f"lag:{self.column}:{self.k}"
        if self.kind == "log":
            return f"log:{self.column}:{self.floor!r}"
        if self.kind == "subtract_group_mean":
            return f"subtract_group_mean:{self.column}:{','.join(self.group_by)}"
        return f"{self.kind}:{self.column}"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Named numeric columns of equal length plus a transform history."""

    names: tuple[str, ...]
    _cols: dict[str, np.ndarray]
    history: tuple[TransformSpec, ...] = ()
    n_dropped: int = 0  # rows dropped at ingestion under na_policy=drop_rows

    def __post_init__(self):
        if not self.names:
            raise CsvParseError("dataset has no columns")
        if len(set(self.names)) != len(self.names):
            raise CsvParseError("duplicate column names")
        if any(not n for n in self.names):
            raise CsvParseError("empty column name")
        lengths = {self._cols[n].shape[0] for n in self.names}
        if len(lengths) != 1:
            raise CsvParseError(f"columns have unequal lengths: {sorted(lengths)}")
        n = lengths.pop()
        if n < 1:
            raise CsvParseError("zero data rows")
        for name in self.names:
            col = self._cols[name]
            if not np.all(np.isfinite(col)):
                raise CsvParseError(f"non-finite values in column {name!r}")
            col.flags.writeable = False

    @classmethod
    def from_columns(cls, pairs, history=(), n_dropped=0) -> "Dataset":
        """Build from an iterable of (name, values) pairs."""
        names = []
        cols = {}
        for name, values in pairs:
            names.append(str(name))
            cols[str(name)] = np.ascontiguousarray(values, dtype=float)
        return cls(tuple(names), cols, tuple(history), n_dropped)

    @property
    def n_rows(self) -> int:
        return int(self._cols[self.names[0]].shape[0])

    def column(self, name: str) -> np.ndarray:
        if name not in self._cols:
            raise TransformError(f"unknown column {name!r}")
        return self._cols[name]

    def columns(self):
        return {name: self._cols[name] for name in self.names}

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.names == other.names
            and self.history == other.history
            and self.n_dropped == other.n_dropped
            and all(np.array_equal(self._cols[n], other._cols[n]) for n in self.names)
        )

    def to_csv_string(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.names)
        cols = [self._cols[n] for n in self.names]
        for i in range(self.n_rows):
            writer.writerow([repr(float(c[i])) for c in cols])
        return buf.getvalue()

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv_string())


@dataclass(frozen=True)
class NormalizedColumn:
    """Max-min normalized values with the original range for round-trips."""

    values: np.ndarray
    original_min: float
    original_max: float

    def denormalize(self, u):
        return self.original_min + np.asarray(u) * (self.original_max - self.original_min)


def read_csv_text(text: str, delimiter: str = ",", na_policy: str = "reject"):
    """Parse CSV text into a Dataset. See :func:`read_csv`."""
    if na_policy not in ("reject", "drop_rows"):
        raise KanmatError(f"unknown na_policy {na_policy!r}")
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise CsvParseError("empty file") from None
    header = [h.strip() for h in header]
    if any(not h for h in header):
        raise CsvParseError("empty header name")
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise CsvParseError(f"duplicate header names: {dupes}")

    rows = []
    dropped = 0
    for r, cells in enumerate(reader, start=2):
        if not cells:
            continue
        if len(cells) != len(header):
            raise CsvParseError(f"row has {len(cells)} cells, expected {len(header)}", row=r)
        parsed = np.empty(len(header))
        missing = False
        for c, cell in enumerate(cells):
            token = cell.strip()
            if token in NA_TOKENS:
                missing = True
                continue
            try:
                value = float(token)
            except ValueError:
                raise CsvParseError(
                    f"non-numeric cell {cell!r}", row=r, column=header[c]
                ) from None
            if not np.isfinite(value):
                missing = True
                continue
            parsed[c] = value
        if missing:
            if na_policy == "reject":
                raise CsvParseError("missing or non-finite value", row=r)
            dropped += 1
            continue
        rows.append(parsed)

    if not rows:
        raise CsvParseError("zero data rows")
    data = np.vstack(rows)
    return Dataset.from_columns(
        ((name, data[:, i]) for i, name in enumerate(header)), n_dropped=dropped
    )


def read_csv(path, delimiter: str = ",", na_policy: str = "reject") -> Dataset:
    """Read a headered numeric CSV.

    ``na_policy`` decides what happens to rows containing NA tokens
    ("", "NA", "NaN") or non-finite numbers: "reject" raises, "drop_rows"
    drops them and records the count on ``Dataset.n_dropped``.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()
    return read_csv_text(text, delimiter=delimiter, na_policy=na_policy)


def apply_transform(d: Dataset, t: TransformSpec) -> Dataset:
    """Apply one transform, returning a new dataset with updated history."""
    if t.column not in d.names:
        raise TransformError(f"unknown column {t.column!r}")
    for g in t.group_by:
        if g not in d.names:
            raise TransformError(f"unknown group_by column {g!r}")
    history = d.history + (t,)
    cols = d.columns()

    if t.kind == "drop":
        pairs = [(n, cols[n]) for n in d.names if n != t.column]
        if not pairs:
            raise TransformError("cannot drop the last column")
        return Dataset.from_columns(pairs, history, d.n_dropped)

    if t.kind == "lag":
        if t.k >= d.n_rows:
            raise TransformError(f"lag k={t.k} >= n_rows={d.n_rows}")
        new_name = f"{t.column}_lag{t.k}"
        if new_name in d.names:
            raise TransformError(f"column {new_name!r} already exists")
        src = cols[t.column]
        pairs = [(n, cols[n][t.k :]) for n in d.names]
        pairs.append((new_name, src[: d.n_rows - t.k]))
        return Dataset.from_columns(pairs, history, d.n_dropped)

    if t.kind == "log":
        shifted = cols[t.column] + t.floor
        if np.any(shifted <= 0):
            raise TransformError(
                f"log of non-positive value in column {t.column!r} (floor={t.floor})"
            )
        new = np.log10(shifted)
    elif t.kind == "subtract_mean":
        v = cols[t.column]
        new = v - v.mean()
    else:  # subtract_group_mean
        if not t.group_by:
            raise TransformError("subtract_group_mean requires group_by columns")
        v = cols[t.column]
        keys = np.stack([cols[g] for g in t.group_by], axis=1)
        _, inverse = np.unique(keys, axis=0, return_inverse=True)
        sums = np.bincount(inverse, weights=v)
        counts = np.bincount(inverse)
        new = v - (sums / counts)[inverse]

    pairs = [(n, new if n == t.column else cols[n]) for n in d.names]
    return Dataset.from_columns(pairs, history, d.n_dropped)


def apply_transforms(d: Dataset, specs) -> Dataset:
    for t in specs:
        d = apply_transform(d, t)
    return d


def replay_history(base: Dataset, history) -> Dataset:
    """Re-apply a recorded transform list to a freshly ingested dataset."""
    return apply_transforms(base, history)


def normalize_minmax(values) -> NormalizedColumn:
    """Map values affinely onto [0, 1]; raises CONSTANT_COLUMN when degenerate."""
    v = np.asarray(values, dtype=float)
    lo = float(v.min())
    hi = float(v.max())
    if hi <= lo:
        raise ConstantColumnError("column has fewer than two distinct values")
    return NormalizedColumn((v - lo) / (hi - lo), lo, hi)


def parse_op_string(ops: str) -> list[TransformSpec]:
    """Parse "lag:Ux:50;subtract_group_mean:p:time;drop:z" style transform lists."""
    specs = []
    for chunk in ops.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        kind = parts[0]
        if kind not in TRANSFORM_KINDS:
            raise TransformError(f"unknown transform kind {kind!r} in {chunk!r}")
        if len(parts) < 2 or not parts[1]:
            raise TransformError(f"missing column in {chunk!r}")
        column = parts[1]
        if kind == "lag":
            if len(parts) != 3:
                raise TransformError(f"lag needs a k argument in {chunk!r}")
            try:
                k = int(parts[2])
            except ValueError:
                raise TransformError(f"bad lag k in {chunk!r}") from None
            specs.append(TransformSpec("lag", column, k=k))
        elif kind == "log":
            floor = 1e-6
            if len(parts) == 3:
                try:
                    floor = float(parts[2])
                except ValueError:
                    raise TransformError(f"bad log floor in {chunk!r}") from None
            elif len(parts) > 3:
                raise TransformError(f"too many arguments in {chunk!r}")
            specs.append(TransformSpec("log", column, floor=floor))
        elif kind == "subtract_group_mean":
            if len(parts) != 3 or not parts[2]:
                raise TransformError(f"subtract_group_mean needs group columns in {chunk!r}")
            specs.append(
                TransformSpec("subtract_group_mean", column, group_by=tuple(parts[2].split(",")))
            )
        else:
            if len(parts) != 2:
                raise TransformError(f"too many arguments in {chunk!r}")
            specs.append(TransformSpec(kind, column))
    if not specs:
        raise TransformError("empty transform list")
    return specs
