"""Limiting rate functions for the extreme scaled squared moduli.

All rates are parametrized by the regime of alpha = lim v/n (zero, a finite
positive value, or infinity) through the kappa map

    kappa (kappa + alpha) = (1 + alpha) x^2,

and every closed form below is the corresponding limit of the finite-alpha
expression unless explicitly noted.  The known exception: the infinity branch
of :func:`rate_max_left` reproduces a published display that is *not* the
pointwise limit of the finite-alpha formula and goes negative on most of
(0, 1); evaluations of it carry a warning, and the consistent limit is
available as :func:`rate_max_left_infinity_consistent`.

Speeds: the max upper tail decays at speed n, the max lower tail at n^2, the
min upper tail at n^2.  The moderate-deviation constants and the small-level
min rates (speed n^2 l^2 through n^2 l^4 depending on regime) live here too.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core_types import AlphaRegime, classify_alpha
from .tau_geometry import kappa

__all__ = [
    "RateEval",
    "rate_max_right",
    "rate_max_left",
    "rate_max_left_infinity_consistent",
    "rate_min_right",
    "mdp_max_right_const",
    "mdp_max_left_const",
    "MdpMinRegime",
    "mdp_min_rate",
    "vscale_rate",
    "vscale_rate_statement_form",
]


@dataclass(frozen=True)
class RateEval:
    """A rate-function evaluation: value, branch tag, and the kappa used
    (None on branches that never form kappa).  ``warning`` flags evaluations
    of displays with known defects."""

    value: float
    branch: str
    kappa_used: float | None = None
    warning: str | None = None


def _regime(alpha) -> AlphaRegime:
    return alpha if isinstance(alpha, AlphaRegime) else classify_alpha(alpha)


def rate_max_right(alpha, x: float) -> RateEval:
    """Decay rate (speed n) of P(max X >= x); zero on x <= 1.

    Finite alpha: alpha log((1+alpha)/(alpha+kappa)) + 2 (kappa - log x - 1);
    limits 2(x - log x - 1) at alpha=0 and x^2 - 2 log x - 1 at infinity.
    """
    if not x > 0.0:
        raise ValueError("x must be > 0")
    regime = _regime(alpha)
    if x <= 1.0:
        return RateEval(0.0, "zero_region", None)
    if regime.is_zero:
        return RateEval(2.0 * (x - math.log(x) - 1.0), "zero_alpha", float(kappa(regime, x)))
    if regime.is_infinity:
        return RateEval(x * x - 2.0 * math.log(x) - 1.0, "infinite_alpha", float(kappa(regime, x)))
    a = regime.value
    k = float(kappa(regime, x))
    # log((1+a)/(a+k)) as log1p((1-k)/(a+k)): the ratio collapses onto 1 for
    # large a and the direct log would lose the whole surviving term
    value = a * math.log1p((1.0 - k) / (a + k)) + 2.0 * (k - math.log(x) - 1.0)
    return RateEval(value, "finite_alpha", k)


def rate_max_left(alpha, x: float) -> RateEval:
    """Decay rate (speed n^2) of P(max X <= x); zero on x >= 1.

    Finite alpha: (alpha + alpha^2/2) log((1+alpha)/(kappa+alpha)) - log x
    - (alpha + 3 - kappa)(1 - kappa)/2; the alpha=0 limit is
    -log x - (x^2 - 4x + 3)/2.  The infinity branch evaluates the published
    display -log x - (x^4 - 4x^2 + 3)/2, which is not the limit of the
    finite-alpha formula and is negative on most of (0,1); it is returned
    with a warning.  See :func:`rate_max_left_infinity_consistent`.
    """
    if not x > 0.0:
        raise ValueError("x must be > 0")
    regime = _regime(alpha)
    if x >= 1.0:
        return RateEval(0.0, "zero_region", None)
    if regime.is_zero:
        value = -math.log(x) - (x * x - 4.0 * x + 3.0) / 2.0
        return RateEval(value, "zero_alpha", float(kappa(regime, x)))
    if regime.is_infinity:
        x2 = x * x
        value = -math.log(x) - (x2 * x2 - 4.0 * x2 + 3.0) / 2.0
        return RateEval(
            value,
            "infinite_alpha_display",
            float(kappa(regime, x)),
            warning=(
                "published infinite-alpha display; not the pointwise limit of the "
                "finite-alpha rate and negative on most of (0,1) - see "
                "rate_max_left_infinity_consistent"
            ),
        )
    a = regime.value
    k = float(kappa(regime, x))
    # same log1p rewrite as in rate_max_right, and more load-bearing here:
    # the log carries a factor a^2/2, so eps-level error in it would swamp
    # the O(1) value long before a reaches the infinity regime
    value = (
        (a + a * a / 2.0) * math.log1p((1.0 - k) / (k + a))
        - math.log(x)
        - (a + 3.0 - k) * (1.0 - k) / 2.0
    )
    return RateEval(value, "finite_alpha", k)


def rate_max_left_infinity_consistent(x: float) -> float:
    """Pointwise alpha -> infinity limit of the finite-alpha left max rate:
    x^2 - x^4/4 - 3/4 - log x on (0, 1), zero at 1."""
    if not x > 0.0:
        raise ValueError("x must be > 0")
    if x >= 1.0:
        return 0.0
    x2 = x * x
    return x2 - x2 * x2 / 4.0 - 0.75 - math.log(x)


def rate_min_right(alpha, x: float) -> RateEval:
    """Decay rate (speed n^2) of P(min X >= x), positive for all x > 0.

    Branches at x = 1 (continuously):

    x >= 1: alpha ((alpha+2)/2 log(1+1/alpha) - log(1+kappa/alpha))
            + 2 kappa - (3+alpha)/2 - log x
    x < 1:  alpha^2/2 log(1+kappa/alpha) - (alpha kappa - kappa^2)/2

    Limits: 2x - 3/2 - log x and x^2/2 at alpha=0;
            x^2 - log x - 3/4 and x^4/4 at infinity.
    """
    if not x > 0.0:
        raise ValueError("x must be > 0")
    regime = _regime(alpha)
    k = float(kappa(regime, x))
    if x >= 1.0:
        if regime.is_zero:
            value = 2.0 * x - 1.5 - math.log(x)
        elif regime.is_infinity:
            value = x * x - math.log(x) - 0.75
        else:
            a = regime.value
            value = (
                a * ((a + 2.0) / 2.0 * math.log1p(1.0 / a) - math.log1p(k / a))
                + 2.0 * k
                - (3.0 + a) / 2.0
                - math.log(x)
            )
        return RateEval(value, "above_one", k)
    if regime.is_zero:
        value = x * x / 2.0
    elif regime.is_infinity:
        value = x * x * x * x / 4.0
    else:
        a = regime.value
        value = a * a / 2.0 * math.log1p(k / a) - (a * k - k * k) / 2.0
    return RateEval(value, "below_one", k)


def mdp_max_right_const(alpha) -> float:
    """Coefficient of x^2 in the max upper moderate tail (speed n l^2):
    2(1+alpha)/(2+alpha); 1 at alpha=0, 2 at infinity."""
    regime = _regime(alpha)
    if regime.is_zero:
        return 1.0
    if regime.is_infinity:
        return 2.0
    a = regime.value
    return 2.0 * (1.0 + a) / (2.0 + a)


def mdp_max_left_const(alpha) -> float:
    """Coefficient of x^3 in the max lower moderate tail (speed n^2 l^3):
    4(1+alpha)^2/(3(2+alpha)^2); 1/3 at alpha=0, 4/3 at infinity."""
    regime = _regime(alpha)
    if regime.is_zero:
        return 1.0 / 3.0
    if regime.is_infinity:
        return 4.0 / 3.0
    a = regime.value
    return 4.0 * (1.0 + a) ** 2 / (3.0 * (2.0 + a) ** 2)


class MdpMinRegime(enum.Enum):
    """Which v-growth regime a small-level min query falls in.

    SMALL_V:       v = O(sqrt(n log n)); level l x, speed n^2 l^2.
    V_SCALE:       sqrt(n log n) << v << n; level (v/n) x, speed v^2.
    INTERMEDIATE:  sqrt(n log n) << v << n; level l x with v/n << l << 1,
                   speed n^2 l^2.
    ALPHA_POSITIVE: v ~ alpha n with alpha in (0, inf]; level l x,
                   speed n^2 l^4.
    """

    SMALL_V = "small-v"
    V_SCALE = "v-scale"
    INTERMEDIATE = "intermediate"
    ALPHA_POSITIVE = "alpha-positive"


def vscale_rate(x: float) -> float:
    """Rate at the v/n level scale (speed v^2), in the proof form

        Phi(x) = log((1 + sqrt(1+4x^2))/2)/2 + (1 + x^2)/2 - sqrt(1+4x^2)/2.

    Small-x behavior Phi(x) = x^4/4 - x^6/3 + O(x^8); Phi(x)/(x^2/2) -> 1 as
    x -> infinity, matching the intermediate regime.  Phi(0) = 0.
    """
    if not x >= 0.0:
        raise ValueError("x must be >= 0")
    r = math.sqrt(1.0 + 4.0 * x * x)
    return 0.5 * math.log((1.0 + r) / 2.0) + (1.0 + x * x) / 2.0 - r / 2.0


def vscale_rate_statement_form(x: float) -> float:
    """The same rate as published in the theorem statement, with every term
    inside the logarithm:

        log((1 + sqrt(1+4x^2))/2 + 1 + x^2 - sqrt(1+4x^2)) / 2.

    Differs from :func:`vscale_rate` (0.16175 vs 0.12257 at x=1); reported
    side by side so experiments can adjudicate.
    """
    if not x >= 0.0:
        raise ValueError("x must be >= 0")
    r = math.sqrt(1.0 + 4.0 * x * x)
    return 0.5 * math.log((1.0 + r) / 2.0 + 1.0 + x * x - r)


def mdp_min_rate(regime: MdpMinRegime, x: float, alpha=None) -> float:
    """Moderate-deviation rate for the min at small levels.

    SMALL_V and INTERMEDIATE: x^2/2.  V_SCALE: the proof-form
    :func:`vscale_rate`.  ALPHA_POSITIVE: (1+alpha)^2/(4 alpha^2) x^4
    (requires alpha in (0, inf]; x^4/4 at infinity).  All regimes accept
    x = 0 and return 0.
    """
    if not x >= 0.0:
        raise ValueError("x must be >= 0")
    if regime in (MdpMinRegime.SMALL_V, MdpMinRegime.INTERMEDIATE):
        return x * x / 2.0
    if regime is MdpMinRegime.V_SCALE:
        return vscale_rate(x)
    if regime is MdpMinRegime.ALPHA_POSITIVE:
        reg = _regime(alpha)
        if reg.is_zero:
            raise ValueError("alpha-positive regime needs alpha > 0")
        if reg.is_infinity:
            return x * x * x * x / 4.0
        a = reg.value
        return (1.0 + a) ** 2 / (4.0 * a * a) * x ** 4
    raise ValueError(f"unknown regime {regime!r}")
