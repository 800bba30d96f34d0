"""Multi-target feature ranking and the top-k random-forest evaluation.

A ranking scores every candidate input against every target (additive-model
strengths, |Pearson r|, or symmetric NMI), averages the scores across
targets, and orders inputs by the average. ``evaluate_topk`` then trains one
multi-output forest per k on the top-k inputs and reports holdout skill, with
a split shared across ranking methods and k values so comparisons isolate
the ranking itself.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import scoring
from .additive import FitConfig
from .dataset import Dataset
from .errors import ConstantColumnError, KanmatError
from .forest import ForestParams, fit_random_forest
from .matrix import compute_mkan
from .util import split_indices, stable_rng


@dataclass
class RankingReport:
    method: str
    targets: tuple[str, ...]
    per_target_strengths: dict[str, dict[str, float]]  # input -> target -> score
    average: dict[str, float]
    order: tuple[str, ...]  # inputs by descending average, ties by name
    per_target_totals: dict[str, float]

    def recompute_average(self) -> dict[str, float]:
        return {
            inp: float(np.mean([scores[t] for t in self.targets]))
            for inp, scores in self.per_target_strengths.items()
        }

    def to_table_csv(self) -> str:
        """Rank table: one row per input, per-target scores, average, rank."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["input", *self.targets, "average", "rank"])
        for rank, inp in enumerate(self.order, start=1):
            scores = self.per_target_strengths[inp]
            writer.writerow(
                [inp, *(f"{scores[t]:.3f}" for t in self.targets),
                 f"{self.average[inp]:.3f}", rank]
            )
        writer.writerow(
            ["total", *(f"{self.per_target_totals[t]:.3f}" for t in self.targets),
             f"{float(np.mean([self.per_target_totals[t] for t in self.targets])):.3f}", ""]
        )
        return buf.getvalue()


def _check_targets(d: Dataset, targets) -> list[str]:
    targets = list(targets)
    if not targets:
        raise KanmatError("targets must be non-empty")
    for t in targets:
        if t not in d.names:
            raise KanmatError(f"unknown target {t!r}")
    inputs = [c for c in d.names if c not in targets]
    if not inputs:
        raise KanmatError("no candidate inputs besides the targets")
    return inputs


def multi_target_ranking(d: Dataset, targets, cfg: FitConfig | None = None) -> RankingReport:
    """Rank candidate inputs by additive-model strength averaged over targets.

    Every target row is fit on the non-target inputs only, so targets never
    explain each other.
    """
    cfg = cfg or FitConfig()
    inputs = _check_targets(d, targets)
    m = compute_mkan(d, targets=list(targets), cfg=cfg, inputs=inputs)
    per_target = {
        inp: {t: m.cell(t, inp).strength for t in targets} for inp in inputs
    }
    totals = {t: m.cell(t, t).strength for t in targets}
    return _assemble_report("mkan", tuple(targets), per_target, totals)


def rank_by_baseline(d: Dataset, targets, method: str, cfg: FitConfig | None = None) -> RankingReport:
    """Rank inputs by |Pearson r| or symmetric NMI per (target, input)."""
    cfg = cfg or FitConfig()
    method = method.lower()
    if method not in ("pearson", "nmi"):
        raise KanmatError(f"unknown baseline method {method!r}")
    inputs = _check_targets(d, targets)
    bins = cfg.mi_bins if cfg.mi_bins > 0 else scoring.default_mi_bins(d.n_rows)

    def score(inp, t):
        x = d.column(inp)
        y = d.column(t)
        if method == "pearson":
            try:
                return abs(scoring.pearson(x, y))
            except ConstantColumnError:
                return 0.0
        return scoring.mutual_information(x, y, bins).nmi_symmetric

    per_target = {inp: {t: float(score(inp, t)) for t in targets} for inp in inputs}
    totals = {t: float(sum(per_target[inp][t] for inp in inputs)) for t in targets}
    return _assemble_report(method, tuple(targets), per_target, totals)


def _assemble_report(method, targets, per_target, totals) -> RankingReport:
    average = {
        inp: float(np.mean([scores[t] for t in targets]))
        for inp, scores in per_target.items()
    }
    order = tuple(sorted(average, key=lambda inp: (-average[inp], inp)))
    return RankingReport(
        method=method,
        targets=targets,
        per_target_strengths=per_target,
        average=average,
        order=order,
        per_target_totals=totals,
    )


@dataclass
class TopKScores:
    k: int
    features: tuple[str, ...]
    per_target: dict[str, float]  # holdout NSE per target
    mean: float                   # mean of the per-target scores
    pooled: float                 # single NSE over all targets stacked


@dataclass
class TopKReport:
    targets: tuple[str, ...]
    ks: tuple[int, ...]
    scores: dict[int, TopKScores]
    params: ForestParams

    def to_csv_row(self, label: str) -> list[str]:
        return [label, *(f"{self.scores[k].mean:.3f}" for k in self.ks)]


def topk_split(n: int, params: ForestParams, holdout_fraction: float = 0.2):
    """The shared 80/20 split; depends only on (seed, n) so every ranking
    method and every k sees the same rows."""
    rng = stable_rng(params.seed, "topk-split", n)
    return split_indices(n, holdout_fraction, rng)


def evaluate_topk(
    d: Dataset,
    ranking: RankingReport,
    targets,
    ks,
    params: ForestParams | None = None,
) -> TopKReport:
    """Holdout skill of one joint multi-output forest per top-k feature set."""
    params = params or ForestParams()
    targets = list(targets)
    _check_targets(d, targets)
    ks = sorted(set(int(k) for k in ks))
    if not ks or ks[0] < 1:
        raise KanmatError("ks must be positive integers")
    if ks[-1] > len(ranking.order):
        raise KanmatError(
            f"k={ks[-1]} exceeds the {len(ranking.order)} ranked inputs"
        )
    Y = np.column_stack([d.column(t) for t in targets])
    train, test = topk_split(d.n_rows, params)

    scores = {}
    for k in ks:
        feats = ranking.order[:k]
        X = np.column_stack([d.column(f) for f in feats])
        forest = fit_random_forest(X[train], Y[train], params)
        pred = forest.predict(X[test])
        per_target = {
            t: float(scoring.nse(Y[test, j], pred[:, j])) for j, t in enumerate(targets)
        }
        pooled = float(scoring.nse(Y[test].ravel(), pred.ravel()))
        scores[k] = TopKScores(
            k=k,
            features=tuple(feats),
            per_target=per_target,
            mean=float(np.mean(list(per_target.values()))),
            pooled=pooled,
        )
    return TopKReport(targets=tuple(targets), ks=tuple(ks), scores=scores, params=params)
