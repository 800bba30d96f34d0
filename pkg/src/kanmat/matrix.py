"""Association matrices: PKAN, MKAN, and the Pearson / NMI baselines.

Every cell holds a strength in [0, 1] plus, for the spline matrices, a
sampled functional-form polyline. Cells are independent jobs keyed by
(seed, row, col), so assembly parallelizes without affecting results.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import scoring
from .additive import EdgeModel, FitConfig, fit_additive, fit_pairwise, holdout_split
from .dataset import Dataset
from .errors import ConstantColumnError, KanmatError
from .util import clip01, parallel_map

KINDS = ("PKAN", "MKAN", "PEARSON", "NMI")


@dataclass(frozen=True)
class Polyline:
    """Sampled curve: normalized abscissae, values, and raw input positions."""

    u: np.ndarray
    v: np.ndarray
    x: np.ndarray

    def points(self) -> list[tuple[float, float]]:
        return [(float(a), float(b)) for a, b in zip(self.u, self.v)]


def sample_curve(edge: EdgeModel, samples: int) -> Polyline:
    """Sample the edge function at equally spaced normalized inputs."""
    if samples < 2:
        raise KanmatError("need at least 2 curve samples")
    u = np.linspace(0.0, 1.0, samples)
    v = edge.evaluate_normalized(u)
    x = edge.input_min + u * (edge.input_max - edge.input_min)
    return Polyline(u=u, v=v, x=x)


@dataclass
class MatrixCell:
    row_name: str
    col_name: str
    strength: float
    curve: list[tuple[float, float]] | None
    raw: dict

    def __post_init__(self):
        self.strength = clip01(self.strength)


@dataclass
class AssociationMatrix:
    kind: str
    labels: tuple[str, ...]
    excluded_targets: tuple[str, ...]
    cells: dict[tuple[str, str], MatrixCell]
    config: dict
    seed: int

    @property
    def row_labels(self) -> tuple[str, ...]:
        return tuple(l for l in self.labels if l not in self.excluded_targets)

    def cell(self, row: str, col: str) -> MatrixCell:
        return self.cells[(row, col)]

    def strength_grid(self) -> np.ndarray:
        rows = self.row_labels
        return np.array(
            [[self.cells[(r, c)].strength for c in self.labels] for r in rows]
        )


def _flat_curve(samples: int) -> list[tuple[float, float]]:
    u = np.linspace(0.0, 1.0, samples)
    return [(float(a), 0.0) for a in u]


def _identity_curve(samples: int) -> list[tuple[float, float]]:
    u = np.linspace(0.0, 1.0, samples)
    return [(float(a), float(a)) for a in u]


def _is_constant(values: np.ndarray) -> bool:
    return values.min() == values.max()


def _check_dataset(d: Dataset, min_columns: int = 2, min_rows: int = 1):
    if len(d.names) < min_columns:
        raise KanmatError(f"need at least {min_columns} columns")
    if d.n_rows < min_rows:
        raise KanmatError(f"need at least {min_rows} rows")


def compute_pkan(d: Dataset, cfg: FitConfig | None = None) -> AssociationMatrix:
    """One single-edge fit per ordered (target, input) pair.

    Strength is the clipped holdout skill of the fitted edge; the diagonal is
    the identity association with strength exactly 1. Constant columns yield
    flagged zero-strength cells instead of failing the whole matrix.
    """
    cfg = cfg or FitConfig()
    _check_dataset(d, min_columns=2, min_rows=20)
    labels = d.names
    M = cfg.curve_samples

    def cell_job(pair):
        target, inp = pair
        x = d.column(inp)
        x_range = [float(x.min()), float(x.max())]
        if target == inp:
            return MatrixCell(target, inp, 1.0, _identity_curve(M),
                              {"metric": 1.0, "share": 1.0, "flags": ["identity"],
                               "x_range": x_range})
        y = d.column(target)
        flags = []
        if _is_constant(x):
            flags.append("constant_input")
        if _is_constant(y):
            flags.append("constant_target")
        if flags:
            return MatrixCell(target, inp, 0.0, _flat_curve(M),
                              {"metric": 0.0, "share": 0.0, "flags": flags,
                               "x_range": x_range})
        edge, diag = fit_pairwise(x, y, cfg, input_name=inp, target_name=target)
        curve = sample_curve(edge, M)
        return MatrixCell(
            target, inp, clip01(diag["test_metric"]), curve.points(),
            {
                "metric": diag["test_metric"],
                "train_metric": diag["train_metric"],
                "share": 1.0,
                "flags": [],
                "x_range": [edge.input_min, edge.input_max],
            },
        )

    pairs = [(t, i) for t in labels for i in labels]
    cells = {pair: cell for pair, cell in zip(pairs, parallel_map(cell_job, pairs))}
    return AssociationMatrix(
        kind="PKAN", labels=labels, excluded_targets=(), cells=cells,
        config=asdict(cfg), seed=cfg.seed,
    )


def _quantile_curve(obs: np.ndarray, pred: np.ndarray, samples: int):
    """Observed-vs-predicted relation as quantile-paired points.

    The observed quantiles give the abscissae (normalized to [0, 1]) and the
    prediction quantiles the values, so the curve is monotone in the observed
    coordinate. Duplicate abscissae from flat regions are collapsed and the
    curve re-sampled onto a strictly increasing grid.
    """
    levels = np.linspace(0.0, 1.0, max(samples, 8))
    oq = np.quantile(obs, levels)
    pq = np.quantile(pred, levels)
    span = oq[-1] - oq[0]
    if span <= 0:
        return _flat_curve(samples)
    u = (oq - oq[0]) / span
    u, keep = np.unique(u, return_index=True)
    v = pq[keep]
    grid = np.linspace(0.0, 1.0, samples)
    return [(float(a), float(b)) for a, b in zip(grid, np.interp(grid, u, v))]


def _target_row(d: Dataset, target: str, input_names, cfg: FitConfig):
    """Fit one MKAN row; returns cells keyed by (target, col) over all labels."""
    M = cfg.curve_samples
    y = d.column(target)
    cells = {}
    if _is_constant(y):
        for col in input_names:
            cells[(target, col)] = MatrixCell(
                target, col, 0.0, _flat_curve(M),
                {"metric": 0.0, "share": 0.0, "flags": ["constant_target"]})
        cells[(target, target)] = MatrixCell(
            target, target, 0.0, _flat_curve(M),
            {"metric": 0.0, "share": 0.0, "flags": ["constant_target"]})
        return cells, None

    columns = {name: d.column(name) for name in input_names}
    try:
        model = fit_additive(columns, y, cfg, target_name=target)
    except ConstantColumnError:
        for col in input_names:
            cells[(target, col)] = MatrixCell(
                target, col, 0.0, _flat_curve(M),
                {"metric": 0.0, "share": 0.0, "flags": ["constant_input"]})
        cells[(target, target)] = MatrixCell(
            target, target, 0.0, _flat_curve(M),
            {"metric": 0.0, "share": 0.0, "flags": ["no_usable_inputs"]})
        return cells, None
    train, test = holdout_split(model.split_seed, d.n_rows, cfg.holdout_fraction)
    x_test = {name: col[test] for name, col in columns.items()}
    res = scoring.strength(model, x_test, y[test], cfg.metric)

    for col in input_names:
        edge = model.edge(col)
        x_range = [float(columns[col].min()), float(columns[col].max())]
        if edge is None:
            flag = "constant_input" if col in model.diagnostics["skipped_constant"] else "pruned"
            cells[(target, col)] = MatrixCell(
                target, col, 0.0, _flat_curve(M),
                {"metric": res.skill.value, "share": 0.0, "flags": [flag],
                 "x_range": x_range})
        else:
            share = float(res.strengths[col] / res.skill.clipped) if res.skill.clipped > 0 else (
                float(res.attribution.shares[res.attribution.names.index(col)]))
            flags = ["degenerate"] if res.attribution.degenerate else []
            cells[(target, col)] = MatrixCell(
                target, col, res.strengths[col], sample_curve(edge, M).points(),
                {"metric": res.skill.value, "share": share, "flags": flags,
                 "x_range": [edge.input_min, edge.input_max]})

    pred_test = model.predict(x_test)
    cells[(target, target)] = MatrixCell(
        target, target, res.skill.clipped, _quantile_curve(y[test], pred_test, M),
        {"metric": res.skill.value, "share": 1.0, "flags": ["observed_vs_predicted"],
         "x_range": [float(y.min()), float(y.max())]})
    return cells, model


def compute_mkan(
    d: Dataset,
    targets=None,
    cfg: FitConfig | None = None,
    inputs=None,
) -> AssociationMatrix:
    """One additive model per target row over candidate input columns.

    ``targets`` defaults to every column; names not in it are excluded as
    targets but still appear as input columns. ``inputs`` optionally
    restricts the candidate inputs for every row (used by the ranking
    benchmark, where targets never serve as inputs of other targets).
    """
    cfg = cfg or FitConfig()
    _check_dataset(d, min_columns=2, min_rows=20)
    labels = d.names
    if targets is None:
        targets = list(labels)
    targets = list(targets)
    for t in targets:
        if t not in labels:
            raise KanmatError(f"unknown target {t!r}")
    if not targets:
        raise KanmatError("no targets selected")
    if inputs is not None:
        for name in inputs:
            if name not in labels:
                raise KanmatError(f"unknown input {name!r}")
    excluded = tuple(l for l in labels if l not in targets)

    def row_job(target):
        if inputs is None:
            row_inputs = [l for l in labels if l != target]
        else:
            row_inputs = [l for l in inputs if l != target]
        row_cells, _ = _target_row(d, target, row_inputs, cfg)
        # columns outside the candidate set still get rendered cells
        M = cfg.curve_samples
        for col in labels:
            if (target, col) not in row_cells:
                row_cells[(target, col)] = MatrixCell(
                    target, col, 0.0, _flat_curve(M),
                    {"metric": 0.0, "share": 0.0, "flags": ["not_candidate"]})
        return row_cells

    cells = {}
    for row_cells in parallel_map(row_job, targets):
        cells.update(row_cells)
    return AssociationMatrix(
        kind="MKAN", labels=labels, excluded_targets=excluded, cells=cells,
        config=asdict(cfg), seed=cfg.seed,
    )


def compute_baseline(d: Dataset, method: str, cfg: FitConfig | None = None) -> AssociationMatrix:
    """Pearson or symmetric-NMI grid; value cells without curves.

    Each unordered pair is computed once and mirrored, so the Pearson grid
    and the symmetric-NMI strengths are exactly symmetric.
    """
    cfg = cfg or FitConfig()
    method = method.upper()
    if method not in ("PEARSON", "NMI"):
        raise KanmatError(f"unknown baseline method {method!r}")
    _check_dataset(d, min_columns=2)
    labels = d.names
    bins = cfg.mi_bins if cfg.mi_bins > 0 else scoring.default_mi_bins(d.n_rows)
    cells = {}

    def pair_job(pair):
        a, b = pair  # cell (row=a, col=b): input b, target a
        xa = d.column(a)
        xb = d.column(b)
        if method == "PEARSON":
            if _is_constant(xa) or _is_constant(xb):
                return (pair, 0.0, {"r": 0.0, "flags": ["constant_column"]})
            if a == b:
                return (pair, 1.0, {"r": 1.0, "flags": []})
            r = scoring.pearson(xb, xa)
            return (pair, clip01(abs(r)), {"r": r, "flags": []})
        est = scoring.mutual_information(xb, xa, bins)
        if _is_constant(xa) or _is_constant(xb):
            flags = ["constant_column"]
        else:
            flags = []
        raw = {
            "mi_bits": est.mi_bits,
            "h_input_bits": est.h_x_bits,
            "h_target_bits": est.h_y_bits,
            "nmi_by_input": est.nmi_by_input,
            "nmi_by_target": est.nmi_by_target,
            "bins": est.bins,
            "flags": flags,
        }
        return (pair, est.nmi_symmetric, raw)

    pairs = [(labels[i], labels[j]) for i in range(len(labels)) for j in range(i, len(labels))]
    for (a, b), strength_value, raw in parallel_map(pair_job, pairs):
        cells[(a, b)] = MatrixCell(a, b, strength_value, None, raw)
        if a != b:
            mirrored = dict(raw)
            if method == "NMI":
                mirrored["h_input_bits"] = raw["h_target_bits"]
                mirrored["h_target_bits"] = raw["h_input_bits"]
                mirrored["nmi_by_input"] = raw["nmi_by_target"]
                mirrored["nmi_by_target"] = raw["nmi_by_input"]
            cells[(b, a)] = MatrixCell(b, a, strength_value, None, mirrored)

    return AssociationMatrix(
        kind=method, labels=labels, excluded_targets=(), cells=cells,
        config=asdict(cfg), seed=cfg.seed,
    )
