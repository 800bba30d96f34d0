"""Strength and functional form of variable associations in tabular data.

Builds association matrices from single-layer spline additive models:
pairwise (PKAN) and multivariate contribution (MKAN) grids with Pearson and
normalized-mutual-information baselines, a multi-target feature-ranking
benchmark with a random-forest evaluation, deterministic synthetic
generators, JSON/SVG rendering, a CLI, and an HTTP service.
"""

from .additive import (
    AdditiveModel,
    EdgeModel,
    FitConfig,
    fit_additive,
    fit_pairwise,
    predict,
    prune_refit,
    ridge_solve,
)
from .dataset import (
    Dataset,
    NormalizedColumn,
    TransformSpec,
    apply_transform,
    apply_transforms,
    normalize_minmax,
    read_csv,
    read_csv_text,
    replay_history,
)
from .errors import (
    ConstantColumnError,
    CsvParseError,
    KanmatError,
    TransformError,
    ZeroMeanObsError,
)
from .forest import Forest, ForestParams, fit_random_forest
from .matrix import (
    AssociationMatrix,
    MatrixCell,
    compute_baseline,
    compute_mkan,
    compute_pkan,
    sample_curve,
)
from .ranking import (
    RankingReport,
    TopKReport,
    evaluate_topk,
    multi_target_ranking,
    rank_by_baseline,
)
from .render import RenderStyle, export_json, matrix_from_json, render_svg
from .scoring import (
    AttributionVector,
    MIEstimate,
    SkillMetric,
    edge_attribution,
    kge_skill,
    mutual_information,
    nse,
    pearson,
    strength,
)
from .splines import SplineBasis, design_matrix, eval_basis, make_basis
from .synth import SynthSpec, gen_heteroscedastic, gen_lagged, gen_nonlinear, generate

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
