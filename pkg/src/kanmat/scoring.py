"""Scalar association and skill measures.

Pearson correlation, NSE, the KGE skill score, histogram mutual information
with three normalizations, per-edge attribution shares, and the final cell
strength (attribution share times clipped skill).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstantColumnError, KanmatError, ZeroMeanObsError
from .util import clip01

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class SkillMetric:
    kind: str  # "nse" | "kge"
    value: float
    clipped: float


@dataclass(frozen=True)
class AttributionVector:
    """Per-edge std ratios and their share-of-sum normalization."""

    names: tuple[str, ...]
    raw: np.ndarray
    shares: np.ndarray
    degenerate: bool = False


@dataclass(frozen=True)
class MIEstimate:
    bins: int
    mi_bits: float
    h_x_bits: float
    h_y_bits: float
    nmi_symmetric: float
    nmi_by_input: float
    nmi_by_target: float


def pearson(x, y) -> float:
    """Sample correlation coefficient; raises on constant columns."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise KanmatError("pearson needs two equal-length columns of size >= 2")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise ConstantColumnError("pearson is undefined for a constant column")
    return float(dx @ dy) / (sx * sy)


def nse(obs, pred) -> float:
    """Skill vs. the observed-mean benchmark: 1 perfect, 0 mean predictor."""
    obs = np.asarray(obs, dtype=float)
    pred = np.asarray(pred, dtype=float)
    if obs.shape != pred.shape:
        raise KanmatError("obs and pred lengths differ")
    dev = obs - obs.mean()
    denom = float(dev @ dev)
    if denom == 0.0:
        raise ConstantColumnError("NSE is undefined for constant observations")
    err = obs - pred
    return 1.0 - float(err @ err) / denom


def kge_skill(obs, pred) -> float:
    """Kling-Gupta efficiency rescaled so the mean benchmark scores 0.

    KGE = 1 - sqrt((r-1)^2 + (sigma_ratio-1)^2 + (mean_ratio-1)^2); the
    skill version maps KGE = 1 - sqrt(2) (the mean predictor) to 0 and
    KGE = 1 to 1. A constant prediction returns 0 by convention.
    """
    obs = np.asarray(obs, dtype=float)
    pred = np.asarray(pred, dtype=float)
    if obs.shape != pred.shape:
        raise KanmatError("obs and pred lengths differ")
    s_obs = float(obs.std())
    if s_obs == 0.0:
        raise ConstantColumnError("KGE is undefined for constant observations")
    m_obs = float(obs.mean())
    if m_obs == 0.0:
        raise ZeroMeanObsError("KGE bias ratio undefined: observations have zero mean")
    s_pred = float(pred.std())
    if s_pred == 0.0:
        return 0.0
    if np.array_equal(obs, pred):
        return 1.0  # exact identity; avoids ulp loss through the sqrt terms
    r = pearson(obs, pred)
    kge = 1.0 - math.sqrt(
        (r - 1.0) ** 2 + (s_pred / s_obs - 1.0) ** 2 + (float(pred.mean()) / m_obs - 1.0) ** 2
    )
    return (kge - (1.0 - SQRT2)) / SQRT2


def compute_skill(kind: str, obs, pred) -> SkillMetric:
    if kind == "nse":
        value = nse(obs, pred)
    elif kind == "kge":
        value = kge_skill(obs, pred)
    else:
        raise KanmatError(f"unknown skill metric {kind!r}")
    return SkillMetric(kind=kind, value=float(value), clipped=clip01(value))


def default_mi_bins(n: int) -> int:
    return int(min(32, max(8, math.ceil(n ** (1.0 / 3.0)))))


def _entropy_bits(counts: np.ndarray, n: int) -> float:
    c = counts[counts > 0].astype(float)
    terms = (c / n) * np.log2(n / c)
    # sorted summation keeps the value identical under axis transposition
    return float(np.sort(terms).sum())


def mutual_information(x, y, bins: int | None = None) -> MIEstimate:
    """Histogram MI between input ``x`` and target ``y`` in bits.

    Both columns are max-min normalized and discretized into equal-width
    bins on [0, 1]. Constant columns yield all-zero estimates. Term sums are
    sorted before accumulation, which makes every field exactly symmetric
    under swapping x and y (up to the input/target relabeling).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise KanmatError("columns have different lengths")
    n = x.size
    if bins is None:
        bins = default_mi_bins(n)
    if bins < 2:
        raise KanmatError("bins must be >= 2")
    if n < bins:
        raise KanmatError(f"need at least {bins} rows for {bins} bins")

    zero = MIEstimate(bins=bins, mi_bits=0.0, h_x_bits=0.0, h_y_bits=0.0,
                      nmi_symmetric=0.0, nmi_by_input=0.0, nmi_by_target=0.0)
    if x.min() == x.max() or y.min() == y.max():
        return zero

    def discretize(v):
        u = (v - v.min()) / (v.max() - v.min())
        return np.minimum((u * bins).astype(int), bins - 1)

    ix = discretize(x)
    iy = discretize(y)
    joint = np.zeros((bins, bins))
    np.add.at(joint, (ix, iy), 1.0)
    cx = joint.sum(axis=1)
    cy = joint.sum(axis=0)

    h_x = _entropy_bits(cx, n)
    h_y = _entropy_bits(cy, n)

    mask = joint > 0
    c_ij = joint[mask]
    rows, cols = np.nonzero(mask)
    ratio = (c_ij * n) / (cx[rows] * cy[cols])
    terms = (c_ij / n) * np.log2(ratio)
    mi = float(np.sort(terms).sum())
    mi = max(mi, 0.0)

    sym = 2.0 * mi / (h_x + h_y) if h_x + h_y > 0 else 0.0
    by_input = mi / h_x if h_x > 0 else 0.0
    by_target = mi / h_y if h_y > 0 else 0.0
    return MIEstimate(
        bins=bins,
        mi_bits=mi,
        h_x_bits=h_x,
        h_y_bits=h_y,
        nmi_symmetric=clip01(sym),
        nmi_by_input=clip01(by_input),
        nmi_by_target=clip01(by_target),
    )


def edge_attribution(model, columns) -> AttributionVector:
    """Share of the model output's variability carried by each edge.

    Raw value per edge: std of the edge activations over all rows divided by
    the std of the summed model output over the same rows. Shares normalize
    the raw values to sum to 1. A constant model output with live edges is a
    cancellation case: every edge gets an equal share and the vector is
    flagged degenerate.
    """
    names = tuple(e.input_name for e in model.edges)
    m = len(names)
    if m == 0:
        return AttributionVector(names=(), raw=np.zeros(0), shares=np.zeros(0))
    acts = [e.evaluate(columns[e.input_name]) for e in model.edges]
    pred = model.intercept + np.sum(acts, axis=0)
    s_pred = float(pred.std())
    if s_pred == 0.0:
        flat = np.full(m, 1.0 / m)
        return AttributionVector(names=names, raw=flat, shares=flat.copy(), degenerate=True)
    raw = np.array([float(a.std()) / s_pred for a in acts])
    total = raw.sum()
    shares = raw / total if total > 0 else np.zeros(m)
    return AttributionVector(names=names, raw=raw, shares=shares)


@dataclass(frozen=True)
class StrengthResult:
    strengths: dict[str, float]  # per-edge share x clipped skill
    skill: SkillMetric
    attribution: AttributionVector


def strength(model, x_test, y_test, metric_kind: str = "nse") -> StrengthResult:
    """Per-edge strengths on holdout data; their sum equals the clipped skill."""
    pred = model.predict(x_test)
    skill = compute_skill(metric_kind, y_test, pred)
    attr = edge_attribution(model, x_test)
    strengths = {
        name: float(share * skill.clipped) for name, share in zip(attr.names, attr.shares)
    }
    return StrengthResult(strengths=strengths, skill=skill, attribution=attr)
