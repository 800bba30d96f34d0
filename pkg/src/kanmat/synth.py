"""Deterministic generators for the three synthetic benchmark datasets.

All noise terms are Gaussian with the stated standard deviation. Given the
same (n, seed, options) the generators return bit-identical datasets; the
draw order is fixed (base variable first, then one noise stream per derived
column).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import KanmatError

EXPERIMENTS = ("nonlinear", "heteroscedastic", "lagged")


@dataclass(frozen=True)
class SynthSpec:
    experiment: str
    n: int
    seed: int = 42
    shift: int = 150          # lagged only
    ordering: str = "sorted"  # lagged only: "sorted" | "iid"
    drop_warmup: bool = False  # lagged only: drop the first `shift` rows

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise KanmatError(f"unknown experiment {self.experiment!r}")
        if self.ordering not in ("sorted", "iid"):
            raise KanmatError(f"unknown ordering {self.ordering!r}")
        if self.experiment == "lagged":
            if self.n < self.shift + 20:
                raise KanmatError(f"lagged needs n >= shift + 20, got n={self.n}")
        elif self.n < 20:
            raise KanmatError(f"need n >= 20, got n={self.n}")


def gen_nonlinear(n: int, seed: int = 42) -> Dataset:
    """x1 uniform on [-2, 2]; x2 = x1^2 + noise(0.1); x3 = x1^3 + noise(0.1)."""
    SynthSpec("nonlinear", n, seed)
    rng = np.random.default_rng(seed)
    x1 = rng.uniform(-2.0, 2.0, n)
    x2 = x1**2 + rng.normal(0.0, 0.1, n)
    x3 = x1**3 + rng.normal(0.0, 0.1, n)
    return Dataset.from_columns([("x1", x1), ("x2", x2), ("x3", x3)])


def gen_heteroscedastic(n: int, seed: int = 42) -> Dataset:
    """x1 uniform on [0, 10]; both responses are 2*x1 plus noise.

    "x2_hetero" carries heteroscedastic noise (per-row standard deviation
    equal to x1); "x3_homo" carries homoscedastic noise with standard
    deviation 5. The names state the noise type so plots cannot be misread.
    """
    SynthSpec("heteroscedastic", n, seed)
    rng = np.random.default_rng(seed)
    x1 = rng.uniform(0.0, 10.0, n)
    hetero = 2.0 * x1 + rng.normal(0.0, 1.0, n) * x1
    homo = 2.0 * x1 + rng.normal(0.0, 5.0, n)
    return Dataset.from_columns([("x1", x1), ("x2_hetero", hetero), ("x3_homo", homo)])


def gen_lagged(
    n: int,
    seed: int = 42,
    shift: int = 150,
    ordering: str = "sorted",
    drop_warmup: bool = False,
) -> Dataset:
    """x1 uniform on [0, 10]; x2 = sin(x1) + noise; x3 = sin(lagged x1) + noise.

    The lag moves each x1 value ``shift`` rows later (circular roll, keeping
    n fixed). With ordering="sorted" x1 is sorted ascending before the
    derived columns are built, which makes the lagged column a near-copy of
    a slightly shifted x1 and therefore strongly associated with it; with
    "iid" the lagged column is independent of same-row x1. Set
    ``drop_warmup`` to drop the first ``shift`` wrapped-around rows.
    """
    SynthSpec("lagged", n, seed, shift=shift, ordering=ordering)
    rng = np.random.default_rng(seed)
    x1 = rng.uniform(0.0, 10.0, n)
    if ordering == "sorted":
        x1 = np.sort(x1)
    lagged = np.roll(x1, shift)
    x2 = np.sin(x1) + rng.normal(0.0, 0.1, n)
    x3 = np.sin(lagged) + rng.normal(0.0, 0.1, n)
    cols = [("x1", x1), ("x2", x2), ("x3", x3)]
    if drop_warmup:
        cols = [(name, values[shift:]) for name, values in cols]
    return Dataset.from_columns(cols)


def generate(spec: SynthSpec) -> Dataset:
    if spec.experiment == "nonlinear":
        return gen_nonlinear(spec.n, spec.seed)
    if spec.experiment == "heteroscedastic":
        return gen_heteroscedastic(spec.n, spec.seed)
    return gen_lagged(spec.n, spec.seed, spec.shift, spec.ordering, spec.drop_warmup)
