"""Single-layer spline additive models fit by regularized least squares.

With one spline layer the model is linear in its coefficients, so fitting is
a closed-form ridge solve on the concatenated per-input design blocks: exact,
fast, and deterministic. Sparsification is an attribution-threshold
prune-and-refit loop guarded by a holdout-skill check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import scoring
from .dataset import NormalizedColumn, normalize_minmax
from .errors import ConstantColumnError, KanmatError
from .splines import SplineBasis, design_matrix, make_basis
from .util import split_indices, stable_seed

log = logging.getLogger(__name__)

MIN_FIT_ROWS = 20
PRUNE_SKILL_GUARD = 0.02  # max tolerated holdout-skill drop per prune step


@dataclass(frozen=True)
class FitConfig:
    grid: int = 10
    degree: int = 3
    ridge_lambda: float = 1e-3
    prune_threshold: float = 0.02
    max_prune_iters: int = 10
    holdout_fraction: float = 0.2
    metric: str = "nse"
    seed: int = 42
    curve_samples: int = 64
    mi_bins: int = 0  # 0 = choose from row count

    def __post_init__(self):
        if self.grid < 1 or self.degree < 1:
            raise KanmatError("grid and degree must be >= 1")
        if self.ridge_lambda < 0:
            raise KanmatError("ridge_lambda must be >= 0")
        if not 0.0 <= self.prune_threshold < 1.0:
            raise KanmatError("prune_threshold must be in [0, 1)")
        if self.max_prune_iters < 0:
            raise KanmatError("max_prune_iters must be >= 0")
        if not 0.0 < self.holdout_fraction < 1.0:
            raise KanmatError("holdout_fraction must be in (0, 1)")
        if self.metric not in ("nse", "kge"):
            raise KanmatError(f"unknown metric {self.metric!r}")
        if self.curve_samples < 2:
            raise KanmatError("curve_samples must be >= 2")


@dataclass
class EdgeModel:
    """One fitted univariate map from a named input to the target."""

    input_name: str
    basis: SplineBasis
    coeffs: np.ndarray
    input_min: float
    input_max: float

    def normalize(self, x) -> np.ndarray:
        u = (np.asarray(x, dtype=float) - self.input_min) / (self.input_max - self.input_min)
        return np.clip(u, 0.0, 1.0)

    def evaluate(self, x) -> np.ndarray:
        """Edge activation for raw input values (normalized and clamped)."""
        return design_matrix(self.basis, self.normalize(x)) @ self.coeffs

    def evaluate_normalized(self, u) -> np.ndarray:
        return design_matrix(self.basis, u) @ self.coeffs


@dataclass
class AdditiveModel:
    target_name: str
    intercept: float
    edges: list[EdgeModel]
    fit_config: FitConfig
    split_seed: int
    diagnostics: dict = field(default_factory=dict)

    def predict(self, columns) -> np.ndarray:
        """Intercept plus the sum of edge activations; pure additive, no
        interaction terms exist by construction."""
        for e in self.edges:
            if e.input_name not in columns:
                raise KanmatError(f"missing column {e.input_name!r}")
        lengths = {np.asarray(col).shape[0] for col in dict(columns).values()}
        if len(lengths) > 1:
            raise KanmatError("prediction columns have unequal lengths")
        n = lengths.pop() if lengths else 1
        out = np.full(n, self.intercept, dtype=float)
        for e in self.edges:
            out += e.evaluate(columns[e.input_name])
        return out

    def edge(self, input_name: str) -> EdgeModel | None:
        for e in self.edges:
            if e.input_name == input_name:
                return e
        return None


def predict(model: AdditiveModel, columns) -> np.ndarray:
    return model.predict(columns)


def ridge_solve(A, b, lam: float) -> np.ndarray:
    """argmin ||Ac - b||^2 + lam ||c||^2 via the normal equations.

    Solved with a Cholesky factorization of (A^T A + lam I). For lam = 0 on
    a rank-deficient system a jitter of 1e-10 * trace / m is added and
    reported through the module logger.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise KanmatError("ridge_solve expects A (n x m) and b (n)")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise KanmatError("non-finite entries in ridge system")
    m = A.shape[1]
    ata = A.T @ A
    atb = A.T @ b
    jitter = 0.0
    if lam == 0.0 and np.linalg.matrix_rank(ata) < m:
        jitter = 1e-10 * float(np.trace(ata)) / m
        log.warning("rank-deficient normal equations; adding jitter %.3e", jitter)
    try:
        factor = cho_factor(ata + (lam + jitter) * np.eye(m), lower=True)
    except np.linalg.LinAlgError:
        # numerically non-positive-definite despite the rank check
        jitter += 1e-10 * float(np.trace(ata)) / m
        log.warning("normal equations not positive definite; adding jitter %.3e", jitter)
        factor = cho_factor(ata + (lam + jitter) * np.eye(m), lower=True)
    return cho_solve(factor, atb)


def holdout_split(split_seed: int, n: int, holdout_fraction: float):
    """(train, test) row indices for a stored split seed; deterministic."""
    rng = np.random.default_rng(split_seed)
    return split_indices(n, holdout_fraction, rng)


def derive_split_seed(cfg: FitConfig, target_name: str, input_names) -> int:
    # keyed on the fit's identity (name-set, not order) so neither parallel
    # schedules nor column order can change results
    return stable_seed(cfg.seed, "split", target_name, tuple(sorted(input_names)))


def _target_standardizer(y_train):
    """(center, scale) of the training target.

    Fits solve the standardized problem and rescale afterwards, which makes
    the ridge solution exactly equivariant under affine maps of the target
    (the penalty would otherwise weigh differently against a rescaled y).
    """
    center = float(y_train.mean())
    scale = float(y_train.std())
    return center, (scale if scale > 0 else 1.0)


def fit_pairwise(x, y, cfg: FitConfig, input_name: str = "x", target_name: str = "y"):
    """Fit one edge from a single input to the target.

    Returns (EdgeModel, diagnostics) where diagnostics carry train and
    holdout skill. The intercept is absorbed into the edge coefficients
    (legal because the basis partitions unity).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise KanmatError("input and target lengths differ")
    n = x.size
    if n < MIN_FIT_ROWS:
        raise KanmatError(f"need at least {MIN_FIT_ROWS} rows, got {n}")
    norm = normalize_minmax(x)

    basis = make_basis(cfg.grid, cfg.degree)
    B = design_matrix(basis, norm.values)
    A = np.hstack([B, np.ones((n, 1))])
    split_seed = derive_split_seed(cfg, target_name, [input_name])
    train, test = holdout_split(split_seed, n, cfg.holdout_fraction)
    center, scale = _target_standardizer(y[train])
    c = ridge_solve(A[train], (y[train] - center) / scale, cfg.ridge_lambda)
    coeffs = scale * (c[:-1] + c[-1]) + center

    edge = EdgeModel(
        input_name=input_name,
        basis=basis,
        coeffs=coeffs,
        input_min=norm.original_min,
        input_max=norm.original_max,
    )
    pred = B @ coeffs
    train_skill = scoring.compute_skill(cfg.metric, y[train], pred[train])
    test_skill = scoring.compute_skill(cfg.metric, y[test], pred[test])
    diagnostics = {
        "train_metric": train_skill.value,
        "test_metric": test_skill.value,
        "train_skill": train_skill.clipped,
        "test_skill": test_skill.clipped,
        "split_seed": split_seed,
    }
    return edge, diagnostics


def _fit_edge_set(names, blocks, y, train, cfg: FitConfig, target_name, split_seed):
    """Ridge-fit the given edge blocks plus an intercept column on the train rows."""
    n = y.size
    if names:
        A = np.hstack([blocks[name].design for name in names] + [np.ones((n, 1))])
        center, scale = _target_standardizer(y[train])
        c = ridge_solve(A[train], (y[train] - center) / scale, cfg.ridge_lambda)
        intercept = float(scale * c[-1] + center)
        edges = []
        offset = 0
        for name in names:
            blk = blocks[name]
            width = blk.design.shape[1]
            edges.append(
                EdgeModel(
                    input_name=name,
                    basis=blk.basis,
                    coeffs=scale * c[offset : offset + width],
                    input_min=blk.norm.original_min,
                    input_max=blk.norm.original_max,
                )
            )
            offset += width
    else:
        intercept = float(y[train].mean())
        edges = []
    return AdditiveModel(
        target_name=target_name,
        intercept=intercept,
        edges=edges,
        fit_config=cfg,
        split_seed=split_seed,
    )


@dataclass
class _Block:
    norm: NormalizedColumn
    basis: SplineBasis
    design: np.ndarray


def _prepare_blocks(columns, cfg: FitConfig):
    blocks = {}
    skipped = []
    for name, values in columns.items():
        try:
            norm = normalize_minmax(values)
        except ConstantColumnError:
            skipped.append(name)
            continue
        basis = make_basis(cfg.grid, cfg.degree)
        blocks[name] = _Block(norm=norm, basis=basis, design=design_matrix(basis, norm.values))
    return blocks, skipped


def _model_test_skill(model: AdditiveModel, columns, y, test):
    x_test = {name: np.asarray(col)[test] for name, col in columns.items()}
    pred = model.predict(x_test)
    return scoring.compute_skill(model.fit_config.metric, y[test], pred)


def fit_additive(columns, y, cfg: FitConfig, target_name: str = "y") -> AdditiveModel:
    """Fit the sum-of-edges model over all given input columns.

    ``columns`` maps input names to value arrays; edges are assembled in
    sorted name order, so the result is bit-identical no matter how the
    mapping is ordered. Constant inputs are skipped and recorded in the
    diagnostics; the fitted model is sparsified with :func:`prune_refit`.
    """
    columns = {
        name: np.asarray(columns[name], dtype=float) for name in sorted(columns)
    }
    y = np.asarray(y, dtype=float)
    if target_name in columns:
        raise KanmatError("target cannot appear among the inputs")
    lengths = {col.shape[0] for col in columns.values()}
    if lengths != {y.shape[0]}:
        raise KanmatError("input and target lengths differ")
    n = y.size
    if n < MIN_FIT_ROWS:
        raise KanmatError(f"need at least {MIN_FIT_ROWS} rows, got {n}")

    blocks, skipped = _prepare_blocks(columns, cfg)
    if not blocks:
        raise ConstantColumnError("all inputs are constant")
    names = [name for name in columns if name in blocks]

    split_seed = derive_split_seed(cfg, target_name, list(columns))
    train, test = holdout_split(split_seed, n, cfg.holdout_fraction)
    model = _fit_edge_set(names, blocks, y, train, cfg, target_name, split_seed)
    model = _prune_loop(model, blocks, columns, y, train, test, cfg.prune_threshold)

    pred = model.predict(columns)
    train_skill = scoring.compute_skill(cfg.metric, y[train], pred[train])
    test_skill = scoring.compute_skill(cfg.metric, y[test], pred[test])
    attr = scoring.edge_attribution(model, columns)
    model.diagnostics = {
        "train_metric": train_skill.value,
        "test_metric": test_skill.value,
        "train_skill": train_skill.clipped,
        "test_skill": test_skill.clipped,
        "per_edge_attribution": dict(zip(attr.names, attr.shares.tolist())),
        "skipped_constant": skipped,
        "split_seed": split_seed,
    }
    return model


def _prune_loop(model, blocks, columns, y, train, test, tau):
    if tau == 0.0 or not model.edges:
        return model
    cfg = model.fit_config
    current_skill = _model_test_skill(model, columns, y, test).clipped
    for _ in range(cfg.max_prune_iters):
        attr = scoring.edge_attribution(model, columns)
        keep = [name for name, share in zip(attr.names, attr.shares) if share >= tau]
        if len(keep) == len(model.edges):
            break
        candidate = _fit_edge_set(keep, blocks, y, train, cfg, model.target_name, model.split_seed)
        candidate_skill = _model_test_skill(candidate, columns, y, test).clipped
        if current_skill - candidate_skill > PRUNE_SKILL_GUARD:
            break
        model = candidate
        current_skill = candidate_skill
        if not model.edges:
            break
    return model


def prune_refit(model: AdditiveModel, columns, y, tau: float | None = None) -> AdditiveModel:
    """Drop edges whose attribution share falls below tau and refit.

    Repeats until stable (at most ``max_prune_iters`` times), rejecting any
    step that lowers the holdout skill by more than 0.02 absolute. The split
    is re-derived from the model's stored seed, so refits see the same rows
    as the original fit.
    """
    cfg = model.fit_config
    if tau is None:
        tau = cfg.prune_threshold
    columns = {name: np.asarray(col, dtype=float) for name, col in columns.items()}
    y = np.asarray(y, dtype=float)
    blocks, _ = _prepare_blocks(
        {e.input_name: columns[e.input_name] for e in model.edges}, cfg
    )
    train, test = holdout_split(model.split_seed, y.size, cfg.holdout_fraction)
    return _prune_loop(model, blocks, columns, y, train, test, tau)
