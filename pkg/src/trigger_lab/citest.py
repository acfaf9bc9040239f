"""G-squared conditional independence tests on discrete data."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import chi2

from .bayesnet import Dataset
from .pattern import DependencyPattern, cell_layout


@dataclass(frozen=True)
class CiResult:
    statistic: float
    dof: int
    p_value: float
    alpha: float

    @property
    def dependent(self) -> bool:
        return self.p_value < self.alpha


def _recode(col: np.ndarray) -> tuple[np.ndarray, int]:
    """Map observed values onto ``0..k-1``; a constant column gets ``k == 1``."""
    uniq, codes = np.unique(col, return_inverse=True)
    return codes.reshape(-1), len(uniq)


def g2_statistic(data: Dataset, x: int, y: int, z: Sequence[int] = ()) -> tuple[float, int]:
    """G-squared statistic and degrees of freedom for ``x`` vs ``y`` stratified by ``z``.

    Strata with no rows contribute no degrees of freedom.
    """
    xs, rx = _recode(data.column(x))
    ys, ry = _recode(data.column(y))
    stratum = np.zeros(data.n_rows, dtype=np.int64)
    n_strata = 1
    for v in z:
        codes, k = _recode(data.column(v))
        stratum = stratum * k + codes
        n_strata *= k
    flat = (stratum * rx + xs) * ry + ys
    counts = np.bincount(flat, minlength=n_strata * rx * ry).reshape(n_strata, rx, ry).astype(float)
    n_z = counts.sum(axis=(1, 2))
    n_xz = counts.sum(axis=2, keepdims=True)
    n_yz = counts.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        expected = n_xz * n_yz / n_z[:, None, None]
        terms = np.where(counts > 0, counts * np.log(counts / expected), 0.0)
    stat = max(2.0 * float(terms.sum()), 0.0)
    dof = int((n_z > 0).sum()) * (rx - 1) * (ry - 1)
    return stat, dof


def ci_test(data: Dataset, x: int, y: int, z: Sequence[int] = (), alpha: float = 0.05) -> CiResult:
    if x == y or x in z or y in z:
        raise ValueError("x, y and the conditioning set must be disjoint")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if data.n_rows < 1:
        raise ValueError("cannot test independence on an empty dataset")
    stat, dof = g2_statistic(data, x, y, z)
    p = 1.0 if dof == 0 else float(chi2.sf(stat, dof))
    return CiResult(stat, dof, p, alpha)


class PValueCache:
    """Memoized p-values for one dataset; alpha-independent so sweeps reuse it."""

    def __init__(self, data: Dataset):
        self.data = data
        self._p: dict[tuple[int, int, tuple[int, ...]], float] = {}

    def p_value(self, x: int, y: int, z: Sequence[int] = ()) -> float:
        a, b = (x, y) if x < y else (y, x)
        key = (a, b, tuple(sorted(z)))
        if key not in self._p:
            self._p[key] = ci_test(self.data, a, b, key[2], 0.5).p_value
        return self._p[key]

    def independent(self, x: int, y: int, z: Sequence[int], alpha: float) -> bool:
        return self.p_value(x, y, z) >= alpha


def empirical_pattern(data: Dataset, alpha: float, cache: PValueCache | None = None) -> DependencyPattern:
    """One test per (evidence set, pair) cell; a cell is 1 when the test rejects independence."""
    if data.n_vars < 2:
        raise ValueError("need at least two variables")
    cache = cache or PValueCache(data)
    bits = tuple(cache.p_value(a, b, s) < alpha for s, (a, b) in cell_layout(data.n_vars))
    return DependencyPattern(data.n_vars, bits)
