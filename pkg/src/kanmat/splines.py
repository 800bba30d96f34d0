"""Clamped uniform B-spline basis on [0, 1].

The basis underlies every fitted edge function: ``n_basis = n_intervals +
degree`` functions over a knot vector with ``degree + 1`` repeated endpoint
knots, evaluated with the standard knot-span recurrence. Inputs outside
[0, 1] are clamped to the boundary, never extrapolated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import KanmatError


@dataclass(frozen=True)
class SplineBasis:
    degree: int
    n_intervals: int
    knots: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.knots.flags.writeable = False

    @property
    def n_basis(self) -> int:
        return self.n_intervals + self.degree

    def greville_abscissae(self) -> np.ndarray:
        """Knot averages; used as coefficients they reproduce the identity."""
        p = self.degree
        return np.array([self.knots[i + 1 : i + 1 + p].mean() for i in range(self.n_basis)])


def make_basis(n_intervals: int, degree: int) -> SplineBasis:
    if n_intervals < 1:
        raise KanmatError(f"n_intervals must be >= 1, got {n_intervals}")
    if degree < 1:
        raise KanmatError(f"degree must be >= 1, got {degree}")
    interior = np.linspace(0.0, 1.0, n_intervals + 1)
    knots = np.concatenate([np.zeros(degree), interior, np.ones(degree)])
    return SplineBasis(degree=degree, n_intervals=n_intervals, knots=knots)


def _find_spans(basis: SplineBasis, u: np.ndarray) -> np.ndarray:
    # span s satisfies knots[s] <= u < knots[s+1]; clamped to the valid
    # interior range so u = 1 lands in the last nonempty interval.
    spans = np.searchsorted(basis.knots, u, side="right") - 1
    return np.clip(spans, basis.degree, basis.n_basis - 1)


def design_matrix(basis: SplineBasis, us) -> np.ndarray:
    """Rows of basis values for each input point (clamped to [0, 1]).

    Vectorized knot-span recurrence: only the ``degree + 1`` locally
    supported functions are computed per point, then scattered into the
    dense n x n_basis matrix.
    """
    u = np.clip(np.atleast_1d(np.asarray(us, dtype=float)), 0.0, 1.0)
    n = u.shape[0]
    p = basis.degree
    knots = basis.knots
    spans = _find_spans(basis, u)

    local = np.zeros((n, p + 1))
    local[:, 0] = 1.0
    left = np.empty((n, p + 1))
    right = np.empty((n, p + 1))
    for j in range(1, p + 1):
        left[:, j] = u - knots[spans + 1 - j]
        right[:, j] = knots[spans + j] - u
        saved = np.zeros(n)
        for r in range(j):
            denom = right[:, r + 1] + left[:, j - r]
            temp = local[:, r] / denom
            local[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        local[:, j] = saved

    out = np.zeros((n, basis.n_basis))
    cols = spans[:, None] + np.arange(-p, 1)[None, :]
    np.put_along_axis(out, cols, local, axis=1)
    return out


def eval_basis(basis: SplineBasis, u: float) -> np.ndarray:
    """Basis values at a single point; nonnegative, summing to 1."""
    return design_matrix(basis, [float(u)])[0]
