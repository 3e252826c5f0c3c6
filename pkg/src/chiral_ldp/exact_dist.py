"""Exact finite-size tail probabilities for the extreme scaled squared moduli.

The squared moduli of the n eigenvalue pairs are jointly distributed as n
independent variables; on the integration scale t = 2 n y the j-th one has
density t^{2j+v-1} K_v(t) / Z_j with Z_j = 2^{2j+v-2} Gamma(j) Gamma(j+v).
A query at level x on the X scale translates to the threshold a = c x,
c = 2 sqrt(n (n+v)).

Per-index tails are integrated adaptively in the log abscissa; the smaller of
sf/cdf is always the one integrated directly and the other recovered through
log1p(-exp(.)), so no subtractive cancellation occurs anywhere.  Product laws
over indices exploit the strict stochastic ordering of the family (sf
increasing in j) to truncate the index scan with a certified bound, scanning
from the dominant end.  Results are bit-identical for any thread count: work
is split into fixed blocks of indices, per-index results land in index order,
and every reduction runs sequentially over that order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._quad import QuadratureError, log_integral_adaptive
from .core_types import (
    LOG_ZERO,
    Direction,
    EnsembleParams,
    Statistic,
    TailQuery,
    derived_scales,
    log1mexp,
)
from .special_fn import UNIFORM_ORDER_MIN, log_Zj, log_kv
from .tau_geometry import _tau_second, minimizer_xj_array

__all__ = [
    "QuadratureSpec",
    "DEFAULT_QUAD",
    "IndexDistribution",
    "log_sf_index",
    "log_cdf_index",
    "log_prob_max_le",
    "log_prob_max_ge",
    "log_prob_min_ge",
    "log_prob_min_le",
    "log_prob",
    "QuadratureError",
]

_BLOCK = 64  # fixed index-block size; independent of thread count on purpose


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy knobs for the per-index tail integrals."""

    rel_tol: float = 1e-10
    panel_order: int = 64
    control_order: int = 40
    max_panels: int = 256

    def __post_init__(self) -> None:
        if not 0.0 < self.rel_tol <= 1e-4:
            raise ValueError("rel_tol must lie in (0, 1e-4]")
        if self.panel_order < 8 or self.control_order < 2:
            raise ValueError("panel_order must be >= 8 and control_order >= 2")
        if self.control_order >= self.panel_order:
            raise ValueError("control order must be below the value order")
        if self.max_panels < 4:
            raise ValueError("max_panels must be >= 4")


DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class IndexDistribution:
    """One member of the independent family on the t scale:
    density t^{2j+v-1} K_v(t) / Z_j."""

    params: EnsembleParams
    j: int

    def __post_init__(self) -> None:
        if not 1 <= self.j <= self.params.n:
            raise ValueError(f"index j must lie in [1, n={self.params.n}], got {self.j}")

    @property
    def power(self) -> float:
        """Exponent b = 2j + v - 1 of the density's power factor."""
        return 2.0 * self.j + self.params.v - 1.0


def _thread_count() -> int:
    raw = os.environ.get("CHIRAL_LDP_THREADS", "1")
    try:
        count = int(raw)
    except ValueError as exc:
        raise ValueError(f"CHIRAL_LDP_THREADS must be an integer, got {raw!r}") from exc
    return max(1, count)


def _mode_and_spread(n: int, v: int, js: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Peak location t* and log-abscissa width of t^{b+1} K_v(t) per index."""
    b = 2.0 * js + v - 1.0
    if v >= UNIFORM_ORDER_MIN:
        xj = minimizer_xj_array(js, float(v))
        t_star = v * xj
        curv = v * xj * xj * _tau_second(js, float(v), xj)
        sigma = 1.0 / np.sqrt(np.maximum(curv, 1e-300))
    else:
        # log-abscissa peak of t^{b+1} K_v(t) ~ t^{b+1/2} e^{-t}
        t_star = b + 0.5
        sigma = 1.0 / np.sqrt(t_star)
    return t_star, sigma


def _tail_one(
    n: int,
    v: int,
    j: int,
    a: float,
    t_star: float,
    sigma_ell: float,
    quad: QuadratureSpec,
    force_side: str | None = None,
) -> tuple[float, float, str]:
    """(log_sf, log_cdf, direct_side) for index j at threshold a on the t scale.

    The side with less mass is integrated directly; the other follows by
    complement.  ``force_side`` pins the direct side (used by invariant tests
    to integrate both sides independently).
    """
    b = 2.0 * j + v - 1.0
    log_z = log_Zj(float(j), float(v))

    def logf(ell: np.ndarray) -> np.ndarray:
        return (b + 1.0) * ell + log_kv(float(v), np.exp(ell)) - log_z

    ell_a = math.log(a)
    side = force_side or ("cdf" if a <= t_star else "sf")
    if side == "sf":
        # doubling a drops >= (a-b) log 2 nats; the b-form covers a near b
        t_hi = max(2.0 * a, b + 60.0 * math.sqrt(max(b, 1.0)) + 400.0)
        lo, hi = ell_a, math.log(t_hi)
        mode = min(max(math.log(t_star), lo), hi)
    else:
        # toward t=0 the integrand falls off like t^{2j} in both regimes
        ell_lo = min(ell_a, math.log(t_star)) - 160.0 / (2.0 * j) - 2.0
        lo, hi = ell_lo, ell_a
        mode = min(max(math.log(t_star), lo), hi)
    log_direct, _ = log_integral_adaptive(
        logf,
        lo,
        hi,
        mode=mode,
        scale=sigma_ell,
        rel_tol=quad.rel_tol,
        panel_order=quad.panel_order,
        control_order=quad.control_order,
        max_panels=quad.max_panels,
    )
    log_direct = min(log_direct, 0.0)  # clip quadrature round-off above 1
    other = log1mexp(log_direct)
    if side == "sf":
        return log_direct, other, side
    return other, log_direct, side


def _index_tails(
    params: EnsembleParams, js: np.ndarray, a: float, quad: QuadratureSpec
) -> tuple[np.ndarray, np.ndarray]:
    """(log_sf, log_cdf) arrays for a block of indices at threshold a."""
    n, v = params.n, params.v
    t_star, sigma = _mode_and_spread(n, v, js.astype(float))
    out_sf = np.empty(js.size)
    out_cdf = np.empty(js.size)
    threads = _thread_count()

    def work(i: int) -> None:
        sf, cdf, _ = _tail_one(n, v, int(js[i]), a, float(t_star[i]), float(sigma[i]), quad)
        out_sf[i] = sf
        out_cdf[i] = cdf

    if threads > 1 and js.size > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(js.size)))
    else:
        for i in range(js.size):
            work(i)
    return out_sf, out_cdf


def _threshold(params: EnsembleParams, x: float) -> float:
    if not (x > 0.0 and math.isfinite(x)):
        raise ValueError(f"level x must be finite and > 0, got {x}")
    return derived_scales(params).c * x


def log_sf_index(
    params: EnsembleParams, j: int, x: float, quad: QuadratureSpec = DEFAULT_QUAD
) -> float:
    """log P(X_j >= x) for one index."""
    dist = IndexDistribution(params, j)
    a = _threshold(params, x)
    js = np.array([dist.j])
    sf, _ = _index_tails(params, js, a, quad)
    return float(sf[0])


def log_cdf_index(
    params: EnsembleParams, j: int, x: float, quad: QuadratureSpec = DEFAULT_QUAD
) -> float:
    """log P(X_j <= x) for one index."""
    dist = IndexDistribution(params, j)
    a = _threshold(params, x)
    js = np.array([dist.j])
    _, cdf = _index_tails(params, js, a, quad)
    return float(cdf[0])


def _product_scan(
    params: EnsembleParams,
    x: float,
    quad: QuadratureSpec,
    descending: bool,
) -> tuple[float, float]:
    """Accumulate S = sum over indices of the dominant-side log tail.

    descending=True sums log cdf_j from j=n down (max queries); False sums
    log sf_j from j=1 up (min queries).  Returns (S, log of the summed
    complements' probabilities) -- the latter feeds the deep-tail branch of
    the 1 - e^S complement when S underflows.

    The scan stops once the remaining indices, each bounded by the current
    term through stochastic monotonicity, cannot move S by rel_tol.
    """
    n = params.n
    a = _threshold(params, x)
    order = range(n, 0, -_BLOCK) if descending else range(1, n + 1, _BLOCK)
    total = 0.0
    other_logs: list[float] = []
    done = False
    for start in order:
        if descending:
            block = np.arange(max(1, start - _BLOCK + 1), start + 1)[::-1]
        else:
            block = np.arange(start, min(n, start + _BLOCK - 1) + 1)
        sf, cdf = _index_tails(params, block, a, quad)
        terms = cdf if descending else sf
        others = sf if descending else cdf
        for i in range(block.size):
            total += float(terms[i])
            other_logs.append(float(others[i]))
        last = float(terms[block.size - 1])
        remaining = (block[-1] - 1) if descending else (n - block[-1])
        bound = remaining * abs(last)
        if bound <= 0.25 * quad.rel_tol * max(abs(total), 1e-300):
            done = True
            break
    if not done and remaining > 0:  # pragma: no cover - scan always terminates
        raise QuadratureError("index scan failed to terminate")
    other_sum = float(logsumexp(np.array(other_logs))) if other_logs else LOG_ZERO
    return total, other_sum


def log_prob_max_le(
    params: EnsembleParams, x: float, quad: QuadratureSpec = DEFAULT_QUAD
) -> float:
    """log P(max_j X_j <= x) = sum_j log P(X_j <= x)."""
    total, _ = _product_scan(params, x, quad, descending=True)
    return total


def log_prob_max_ge(
    params: EnsembleParams, x: float, quad: QuadratureSpec = DEFAULT_QUAD
) -> float:
    """log P(max_j X_j >= x) = log(1 - prod_j P(X_j <= x)).

    When the product is so close to 1 that its log underflows, the
    first-order inclusion-exclusion bound (error below (sum sf)^2 / 2, far
    under double precision there) takes over.
    """
    total, log_sf_sum = _product_scan(params, x, quad, descending=True)
    if total <= -1e-250:
        return log1mexp(total)
    return log_sf_sum


def log_prob_min_ge(
    params: EnsembleParams, x: float, quad: QuadratureSpec = DEFAULT_QUAD
) -> float:
    """log P(min_j X_j >= x) = sum_j log P(X_j >= x)."""
    total, _ = _product_scan(params, x, quad, descending=False)
    return total


def log_prob_min_le(
    params: EnsembleParams, x: float, quad: QuadratureSpec = DEFAULT_QUAD
) -> float:
    """log P(min_j X_j <= x) = log(1 - prod_j P(X_j >= x)); deep-tail branch
    as in :func:`log_prob_max_ge`."""
    total, log_cdf_sum = _product_scan(params, x, quad, descending=False)
    if total <= -1e-250:
        return log1mexp(total)
    return log_cdf_sum


def log_prob(
    params: EnsembleParams, query: TailQuery, quad: QuadratureSpec = DEFAULT_QUAD
) -> float:
    """log probability of a tail query on the X scale."""
    if query.statistic is Statistic.MAX_SQ:
        if query.direction is Direction.GE:
            return log_prob_max_ge(params, query.x, quad)
        return log_prob_max_le(params, query.x, quad)
    if query.direction is Direction.GE:
        return log_prob_min_ge(params, query.x, quad)
    return log_prob_min_le(params, query.x, quad)
