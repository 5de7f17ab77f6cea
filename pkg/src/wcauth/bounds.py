"""Closed-form attack probabilities and break-time accounting.

Two regimes share one parameter object.  At *desk scale* the key and tag
spaces are explicit integers and everything that can be exact is exact
(:class:`fractions.Fraction`, :func:`math.comb`).  At *deployment scale*
(key counts like ``2**2176``) probabilities underflow doubles by
hundreds of orders of magnitude, so values are carried as base-2
logarithms in :class:`Log2Prob`.

The quantities, for a family with ``H`` keys, ``T`` tags, substitution
bound ``epsilon``, and an adversary who cannot eliminate a fraction
``r`` of the keys:

* blind tag guess: ``1/T``;
* substitution after seeing one message/tag pair: ``epsilon``;
* tag guess under partial knowledge: ``min(1, 1/(r*T))``;
* average success seeing the pair *and* holding partial knowledge:
  ``min(1, epsilon/r)``;
* the surviving-class size ``X`` after one observed pair is
  ``1 + Hypergeometric``; its lower tail gives the probability that the
  observed pair already pins the key into a certainty-grade class
  (:func:`weak_pair_prob_exact`, bounded by :func:`chebyshev_bound`);
* an adversary who also chooses the message to be authenticated can
  engineer the tag classes, raising her success to
  ``min(1, (1-r)/r * epsilon/(1-epsilon))``
  (:func:`engineered_attack_prob`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import mpmath

from .errors import DomainError
from .families import as_fraction

#: Julian year, the astronomy convention: 365.25 days.
SECONDS_PER_YEAR = 365.25 * 86400

_LOG10_2 = math.log10(2)

#: Work cap for exact tail sums (number of hypergeometric terms).
MAX_EXACT_TAIL_TERMS = 1 << 14


@dataclass(frozen=True, order=True)
class Log2Prob:
    """A probability carried as its base-2 logarithm.

    ``clamped`` records that the underlying expression exceeded 1 and was
    cut back to a valid probability; the flag survives into reports so a
    vacuous bound is never mistaken for a sharp one.
    """

    log2: float
    clamped: bool = False

    @classmethod
    def from_fraction(cls, value: Fraction) -> "Log2Prob":
        if value < 0 or value > 1:
            raise DomainError(f"{value} is not a probability")
        if value == 0:
            return cls(-math.inf)
        return cls(math.log2(value.numerator) - math.log2(value.denominator))

    @classmethod
    def from_float(cls, value: float) -> "Log2Prob":
        if not 0 <= value <= 1:
            raise DomainError(f"{value} is not a probability")
        return cls(-math.inf) if value == 0 else cls(math.log2(value))

    @property
    def value(self) -> float:
        """The probability as a float (0.0 when it underflows)."""
        return 0.0 if self.log2 == -math.inf else 2.0**self.log2

    @property
    def log10(self) -> float:
        return self.log2 * _LOG10_2

    def decimal_str(self, digits: int = 2) -> str:
        """Scientific-notation string that survives double underflow."""
        if self.log2 == -math.inf:
            return "0"
        exponent = math.floor(self.log10)
        mantissa = 10.0 ** (self.log10 - exponent)
        return f"{mantissa:.{digits}f}e{exponent:+03d}"

    def to_json(self) -> dict:
        return {"log2": self.log2, "clamped": self.clamped}


def _log2_fraction(value: Fraction) -> float:
    if value <= 0:
        return -math.inf
    return math.log2(value.numerator) - math.log2(value.denominator)


def _log2_ratio(value: Union[Fraction, float]) -> float:
    """log2 of a positive rational or float."""
    if isinstance(value, Fraction):
        return _log2_fraction(value)
    return math.log2(value)


@dataclass(frozen=True)
class BoundParams:
    """Parameter set shared by every bound in this module.

    ``epsilon`` is always exact; ``r`` is a :class:`Fraction` when the
    desk-scale machinery needs ``r * num_keys`` to be an integer, or a
    float for deployment-scale parameters (where ``r`` is typically
    irrational, e.g. ``2**-0.125``).  ``num_keys``/``num_tags`` are set
    only at desk scale.
    """

    log2_keys: float
    log2_tags: float
    epsilon: Fraction
    r: Union[Fraction, float]
    num_keys: Optional[int] = None
    num_tags: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        if isinstance(self.r, str):
            object.__setattr__(self, "r", Fraction(self.r))
        if self.log2_keys < self.log2_tags:
            raise DomainError("need at least as many keys as tags")
        if not 0 < float(self.r) <= 1:
            raise DomainError("knowledge fraction r must lie in (0, 1]")
        if not 0 < self.epsilon <= 1:
            raise DomainError("epsilon must lie in (0, 1]")
        if self.num_tags is not None:
            if self.epsilon < Fraction(1, self.num_tags):
                raise DomainError("epsilon below 1/num_tags is impossible")
        elif _log2_fraction(self.epsilon) < -self.log2_tags - 1e-9:
            raise DomainError("epsilon below 1/num_tags is impossible")

    @classmethod
    def desk(cls, num_keys: int, num_tags: int, epsilon, r) -> "BoundParams":
        """Exact parameters for an explicit key/tag space.

        A float ``r`` is snapped to the nearest ``k / num_keys`` when it
        is within ``1e-6`` of one, since desk-scale elimination sizes are
        integral; other values are kept exactly as given.
        """
        if num_keys < 1 or num_tags < 1 or num_keys % num_tags:
            raise DomainError("num_tags must divide num_keys")
        if isinstance(r, float):
            nearest = round(r * num_keys)
            if nearest >= 1 and abs(r * num_keys - nearest) < 1e-6:
                r = Fraction(nearest, num_keys)
        else:
            r = as_fraction(r)
        return cls(
            log2_keys=math.log2(num_keys),
            log2_tags=math.log2(num_tags),
            epsilon=as_fraction(epsilon),
            r=r,
            num_keys=num_keys,
            num_tags=num_tags,
        )

    @classmethod
    def deployment(cls, log2_keys: float, log2_tags: float, epsilon, r):
        """Log-space parameters for key spaces too large to materialize."""
        return cls(
            log2_keys=float(log2_keys),
            log2_tags=float(log2_tags),
            epsilon=as_fraction(epsilon),
            r=r if isinstance(r, (Fraction, float)) else as_fraction(r),
        )

    # -- desk-scale helpers -------------------------------------------------

    @property
    def is_desk(self) -> bool:
        return self.num_keys is not None and self.num_tags is not None

    def _require_desk(self) -> tuple[int, int, int, int]:
        """Return ``(num_keys, num_tags, class_size, surviving)`` exactly."""
        if not self.is_desk:
            raise DomainError(
                "this quantity needs explicit desk-scale num_keys/num_tags"
            )
        if not isinstance(self.r, Fraction):
            raise DomainError("desk-scale exact arithmetic needs exact r")
        surviving = self.r * self.num_keys
        if surviving.denominator != 1:
            raise DomainError(
                f"r*num_keys = {surviving} is not an integer"
            )
        return (
            self.num_keys,
            self.num_tags,
            self.num_keys // self.num_tags,
            int(surviving),
        )

    def certainty_cap(self) -> Fraction:
        """The certainty-class ceiling ``epsilon * H / T`` (desk exact)."""
        if not self.is_desk:
            raise DomainError("certainty_cap needs desk-scale parameters")
        return self.epsilon * self.num_keys / self.num_tags


# -- single-number bounds ----------------------------------------------------


def guess_prob_uniform(params: BoundParams) -> Log2Prob:
    """Blind tag guess with no knowledge at all: ``1/T``."""
    return Log2Prob(-params.log2_tags)


def guess_prob_after_pair(params: BoundParams) -> Log2Prob:
    """Substitution after one observed pair, full key ignorance: ``epsilon``."""
    return Log2Prob(_log2_fraction(params.epsilon))


def guess_prob_partial(params: BoundParams) -> Log2Prob:
    """Blind tag guess under partial key knowledge: ``min(1, 1/(r*T))``."""
    log2 = -params.log2_tags - _log2_ratio(params.r)
    if log2 > 0:
        return Log2Prob(0.0, clamped=True)
    return Log2Prob(log2)


def conditional_success(params: BoundParams, intersection_size) -> Log2Prob:
    """Forgery success once the observed pair leaves ``X`` candidate keys.

    The adversary plays the likeliest forced tag among the ``X``
    remaining keys; condition 2 caps the agreeing keys at
    ``epsilon*H/T``, so the success probability is
    ``min(1, (epsilon*H/T) / X)``.
    """
    if intersection_size < 1:
        raise DomainError("intersection size must be at least 1")
    log2 = (
        _log2_fraction(params.epsilon)
        + params.log2_keys
        - params.log2_tags
        - math.log2(intersection_size)
    )
    if log2 > 0:
        return Log2Prob(0.0, clamped=True)
    return Log2Prob(log2)


def average_success_before_tag(params: BoundParams) -> Log2Prob:
    """Forgery success averaged over the tag draw: ``min(1, epsilon/r)``.

    This is the best an adversary can do when her substitution must be
    committed before the tag is revealed, whatever her partial knowledge;
    it is the ceiling the salted protocol restores.
    """
    log2 = _log2_fraction(params.epsilon) - _log2_ratio(params.r)
    if log2 > 0:
        return Log2Prob(0.0, clamped=True)
    return Log2Prob(log2)


def min_entropy_of_elimination(params: BoundParams) -> float:
    """Min-entropy (bits) of the key under ``r``-fraction elimination."""
    return params.log2_keys + _log2_ratio(params.r)


# -- the surviving-class size X ----------------------------------------------


def hypergeom_pmf(params: BoundParams, intersection_size: int) -> Fraction:
    """Exact ``P(X = i)`` for the surviving-class size ``X`` (desk scale).

    With ``s = r*H`` survivors of which one is the true key, the other
    class members of the observed tag are a without-replacement sample,
    so ``X - 1`` is hypergeometric::

        P(X = i) = C(s-1, i-1) * C(H-s, H/T-i) / C(H-1, H/T-1)

    Out-of-support sizes return 0.
    """
    num_keys, _, class_size, surviving = params._require_desk()
    i = int(intersection_size)
    if i < 1 or i > class_size:
        return Fraction(0)
    if i - 1 > surviving - 1 or class_size - i > num_keys - surviving:
        return Fraction(0)
    return Fraction(
        math.comb(surviving - 1, i - 1)
        * math.comb(num_keys - surviving, class_size - i),
        math.comb(num_keys - 1, class_size - 1),
    )


def hypergeom_pmf_log2(params: BoundParams, intersection_size) -> Log2Prob:
    """``log2 P(X = i)`` via log-gamma, usable at deployment scale.

    Uses high-precision log-gamma so the huge leading terms cancel
    without destroying the result.  Deep-tail values whose log2 exceeds
    the double range come back as ``-inf``.
    """
    log2_keys, log2_tags = params.log2_keys, params.log2_tags
    with mpmath.workdps(60):
        if params.is_desk:
            # exact sizes; avoids support misjudgements from 2**log2 roundoff
            num_keys = mpmath.mpf(params.num_keys)
            class_size = mpmath.mpf(params.num_keys // params.num_tags)
            surviving = mpmath.mpf(int(params.r * params.num_keys))
        else:
            num_keys = mpmath.mpf(2) ** log2_keys
            class_size = mpmath.mpf(2) ** (log2_keys - log2_tags)
            surviving = mpmath.mpf(float(params.r)) * num_keys
        i = mpmath.mpf(intersection_size)
        if i < 1 or i > class_size or i > surviving:
            return Log2Prob(-math.inf)
        if class_size - i > num_keys - surviving:
            return Log2Prob(-math.inf)

        def lchoose(n, k):
            return (
                mpmath.loggamma(n + 1)
                - mpmath.loggamma(k + 1)
                - mpmath.loggamma(n - k + 1)
            )

        log_p = (
            lchoose(surviving - 1, i - 1)
            + lchoose(num_keys - surviving, class_size - i)
            - lchoose(num_keys - 1, class_size - 1)
        )
        log2_p = log_p / mpmath.log(2)
        try:
            return Log2Prob(min(0.0, float(log2_p)))
        except OverflowError:
            return Log2Prob(-math.inf)


def intersection_moments(params: BoundParams) -> tuple[Fraction, Fraction]:
    """Exact mean and variance of the surviving-class size ``X``."""
    num_keys, _, class_size, surviving = params._require_desk()
    if num_keys == 1:
        return Fraction(1), Fraction(0)
    draw_frac = Fraction(surviving - 1, num_keys - 1)
    mean = 1 + (class_size - 1) * draw_frac
    if class_size == 1 or num_keys == 2:
        return mean, Fraction(0)
    variance = (
        (class_size - 1)
        * draw_frac
        * (1 - draw_frac)
        * Fraction(num_keys - class_size, num_keys - 2)
    )
    return mean, variance


def weak_pair_prob_exact(params: BoundParams) -> Fraction:
    """Exact probability that one observed pair pins the key hard enough.

    Sums the lower tail ``P(X <= floor(epsilon*H/T))``: the chance that
    the observed message/tag pair leaves the true key in a class small
    enough that some substitution succeeds with certainty-grade odds.
    """
    num_keys, _, class_size, surviving = params._require_desk()
    cap = params.certainty_cap()
    top = min(cap.numerator // cap.denominator, class_size)
    if top > MAX_EXACT_TAIL_TERMS:
        raise DomainError(
            f"exact tail with {top} terms exceeds cap {MAX_EXACT_TAIL_TERMS}"
        )
    numerator = 0
    for i in range(1, top + 1):
        if class_size - i > num_keys - surviving:
            continue
        if i - 1 > surviving - 1:
            break
        numerator += math.comb(surviving - 1, i - 1) * math.comb(
            num_keys - surviving, class_size - i
        )
    return Fraction(numerator, math.comb(num_keys - 1, class_size - 1))


def chebyshev_bound(
    params: BoundParams, mode: str = "exact-moments"
) -> Union[Fraction, Log2Prob]:
    """Upper bound on the weak-pair probability.

    ``mode="exact-moments"`` (desk scale) applies Chebyshev's inequality
    with the exact hypergeometric moments:
    ``P(X <= epsilon*H/T) <= Var(X) / (E[X] - epsilon*H/T)**2``,
    returned as an exact :class:`Fraction` clamped to 1.  It requires
    ``E[X] > epsilon*H/T``.

    ``mode="asymptotic"`` returns the large-``H`` simplification
    ``(1-r)/r * T/H`` as a :class:`Log2Prob`, valid at any scale.
    """
    if mode == "asymptotic":
        r = params.r
        one_minus_r = (1 - r) if isinstance(r, Fraction) else 1.0 - r
        if one_minus_r == 0:
            return Log2Prob(-math.inf)
        log2 = (
            _log2_ratio(one_minus_r)
            - _log2_ratio(r)
            + params.log2_tags
            - params.log2_keys
        )
        if log2 > 0:
            return Log2Prob(0.0, clamped=True)
        return Log2Prob(log2)
    if mode != "exact-moments":
        raise DomainError(f"unknown chebyshev mode {mode!r}")

    mean, variance = intersection_moments(params)
    cap = params.certainty_cap()
    if mean <= cap:
        raise DomainError(
            f"exact-moments bound needs E[X]={mean} above the cap {cap}"
        )
    bound = variance / (mean - cap) ** 2
    return min(Fraction(1), bound)


# -- message-influence attack --------------------------------------------------


@dataclass(frozen=True)
class EngineeredAttack:
    """Outcome of the engineered-partition analysis.

    ``num_good_subsets`` is the number of certainty-grade classes the
    adversary can carve out of the keys she has eliminated nothing
    about, ``(1-r)*H / ((1-epsilon)*H/T)``; ``success`` is the per-round
    probability ``min(1, (1-r)/r * epsilon/(1-epsilon))``.  ``exact``
    carries the unclamped rational value when ``r`` is exact.
    """

    num_good_subsets: float
    success: Log2Prob
    exact: Optional[Fraction] = None


def engineered_attack_prob(params: BoundParams) -> EngineeredAttack:
    """Success of an adversary who also chooses the authenticated message.

    By steering the message, she makes every key she has *not* excluded
    either certainty-grade (a class of size ``epsilon*H/T``) or useless,
    packing the ``(1-r)*H`` excluded keys into full classes of size
    ``(1-epsilon)*H/T``.  The key she holds partial knowledge of then
    lands in a certainty class with probability
    ``(1-r)/r * epsilon/(1-epsilon)``, which dominates ``epsilon`` (and
    the plain weak-pair probability) whenever ``r < 1``.
    """
    r = params.r
    epsilon = params.epsilon
    if epsilon == 1:
        raise DomainError("engineered partition needs epsilon < 1")
    if isinstance(r, Fraction):
        ratio = (1 - r) / r * epsilon / (1 - epsilon)
        exact = min(Fraction(1), ratio)
        success = (
            Log2Prob(0.0, clamped=True)
            if ratio > 1
            else Log2Prob(_log2_fraction(ratio))
        )
    else:
        exact = None
        if r == 1.0:
            success = Log2Prob(-math.inf)
        else:
            log2 = (
                math.log2(1.0 - r)
                - math.log2(r)
                + _log2_fraction(epsilon)
                - _log2_fraction(1 - epsilon)
            )
            success = Log2Prob(0.0, clamped=True) if log2 > 0 else Log2Prob(log2)
    subsets = (
        float(1 - float(r))
        * 2.0 ** min(params.log2_tags, 1023)
        / float(1 - epsilon)
    )
    return EngineeredAttack(
        num_good_subsets=subsets, success=success, exact=exact
    )


# -- time accounting -----------------------------------------------------------


@dataclass(frozen=True)
class BreakTime:
    """Expected time to the first successful forgery, in log2 seconds."""

    log2_seconds: float

    @property
    def seconds(self) -> float:
        if self.log2_seconds == math.inf:
            return math.inf
        if self.log2_seconds > 1023:
            return math.inf
        return 2.0**self.log2_seconds

    @property
    def log2_years(self) -> float:
        return self.log2_seconds - math.log2(SECONDS_PER_YEAR)

    @property
    def log10_years(self) -> float:
        return self.log2_years * _LOG10_2

    @property
    def years(self) -> float:
        if self.log2_years == math.inf or self.log2_years > 1023:
            return math.inf
        return 2.0**self.log2_years

    @property
    def months(self) -> float:
        return self.years * 12

    def describe(self) -> str:
        """Human-readable magnitude (seconds, months, years, or 1eN years)."""
        if self.log2_seconds == math.inf:
            return "never (success probability is zero)"
        if self.log10_years > 9:
            return f"about 1e{self.log10_years:.2f} years"
        if self.years >= 2:
            return f"about {self.years:.1f} years"
        if self.months >= 1:
            return f"about {self.months:.1f} months"
        return f"about {self.seconds:.3g} seconds"


def expected_break_time(
    prob, rounds_per_second: float, overhead_seconds: float = 0.0
) -> BreakTime:
    """Expected time until a strategy with per-round success ``prob`` lands.

    Success is geometric, so the expected number of rounds is ``1/prob``;
    each round costs ``1/rounds_per_second + overhead_seconds``.  A zero
    probability gives an infinite break time.
    """
    if rounds_per_second <= 0:
        raise DomainError("rounds_per_second must be positive")
    if overhead_seconds < 0:
        raise DomainError("overhead_seconds must be non-negative")
    if isinstance(prob, Log2Prob):
        log2_p = prob.log2
    elif isinstance(prob, Fraction):
        if not 0 <= prob <= 1:
            raise DomainError(f"{prob} is not a probability")
        log2_p = _log2_fraction(prob)
    else:
        if not 0 <= prob <= 1:
            raise DomainError(f"{prob} is not a probability")
        log2_p = -math.inf if prob == 0 else math.log2(prob)
    if log2_p == -math.inf:
        return BreakTime(math.inf)
    per_round = 1.0 / rounds_per_second + overhead_seconds
    return BreakTime(-log2_p + math.log2(per_round))


# -- aggregate report ----------------------------------------------------------

REPORT_COLUMNS = [
    "log2_keys",
    "log2_tags",
    "epsilon",
    "r",
    "min_entropy_bits",
    "guess_uniform_log2",
    "guess_after_pair_log2",
    "guess_partial_log2",
    "guess_partial_clamped",
    "average_before_tag_log2",
    "average_before_tag_clamped",
    "chebyshev_asymptotic_log2",
    "engineered_subsets",
    "engineered_success_log2",
    "engineered_clamped",
    "mean_intersection",
    "var_intersection",
    "weak_pair_exact",
    "weak_pair_exact_float",
    "chebyshev_exact",
    "break_blind_log10_years",
    "break_after_pair_log10_years",
    "break_engineered_log10_years",
    "rounds_per_second",
    "overhead_seconds",
]


@dataclass(frozen=True)
class BoundReport:
    """Every scalar bound for one parameter set, ready for JSON or CSV."""

    params: BoundParams
    guess_uniform: Log2Prob
    guess_after_pair: Log2Prob
    guess_partial: Log2Prob
    average_before_tag: Log2Prob
    min_entropy_bits: float
    chebyshev_asymptotic: Log2Prob
    engineered: EngineeredAttack
    mean_intersection: Optional[Fraction]
    var_intersection: Optional[Fraction]
    weak_pair_exact: Optional[Fraction]
    chebyshev_exact: Optional[Fraction]
    rounds_per_second: Optional[float]
    overhead_seconds: float
    break_blind: Optional[BreakTime]
    break_after_pair: Optional[BreakTime]
    break_engineered: Optional[BreakTime]

    def as_dict(self) -> dict:
        """Flat JSON-safe mapping with the columns of ``REPORT_COLUMNS``."""
        p = self.params
        out = {
            "log2_keys": p.log2_keys,
            "log2_tags": p.log2_tags,
            "epsilon": str(p.epsilon),
            "r": str(p.r) if isinstance(p.r, Fraction) else p.r,
            "min_entropy_bits": self.min_entropy_bits,
            "guess_uniform_log2": self.guess_uniform.log2,
            "guess_after_pair_log2": self.guess_after_pair.log2,
            "guess_partial_log2": self.guess_partial.log2,
            "guess_partial_clamped": self.guess_partial.clamped,
            "average_before_tag_log2": self.average_before_tag.log2,
            "average_before_tag_clamped": self.average_before_tag.clamped,
            "chebyshev_asymptotic_log2": self.chebyshev_asymptotic.log2,
            "engineered_subsets": self.engineered.num_good_subsets,
            "engineered_success_log2": self.engineered.success.log2,
            "engineered_clamped": self.engineered.success.clamped,
            "mean_intersection": _opt_str(self.mean_intersection),
            "var_intersection": _opt_str(self.var_intersection),
            "weak_pair_exact": _opt_str(self.weak_pair_exact),
            "weak_pair_exact_float": (
                None
                if self.weak_pair_exact is None
                else float(self.weak_pair_exact)
            ),
            "chebyshev_exact": _opt_str(self.chebyshev_exact),
            "break_blind_log10_years": _opt_years(self.break_blind),
            "break_after_pair_log10_years": _opt_years(self.break_after_pair),
            "break_engineered_log10_years": _opt_years(self.break_engineered),
            "rounds_per_second": self.rounds_per_second,
            "overhead_seconds": self.overhead_seconds,
        }
        assert list(out) == REPORT_COLUMNS
        return out


def _opt_str(value) -> Optional[str]:
    return None if value is None else str(value)


def _opt_years(bt: Optional[BreakTime]) -> Optional[float]:
    return None if bt is None else bt.log10_years


def build_bound_report(
    params: BoundParams,
    rounds_per_second: Optional[float] = None,
    overhead_seconds: float = 0.0,
) -> BoundReport:
    """Evaluate every bound that the parameter scale allows.

    Desk-only quantities (exact moments, exact tail, exact Chebyshev)
    come back ``None`` at deployment scale or when ``r*num_keys`` is not
    integral; break times come back ``None`` without a round rate.
    """
    engineered = engineered_attack_prob(params)
    mean = variance = weak = cheb = None
    try:
        mean, variance = intersection_moments(params)
        weak = weak_pair_prob_exact(params)
        try:
            cheb = chebyshev_bound(params, mode="exact-moments")
        except DomainError:
            cheb = None
    except DomainError:
        pass

    if rounds_per_second is not None:
        break_blind = expected_break_time(
            guess_prob_uniform(params), rounds_per_second, overhead_seconds
        )
        break_pair = expected_break_time(
            guess_prob_after_pair(params), rounds_per_second, overhead_seconds
        )
        break_eng = expected_break_time(
            engineered.success, rounds_per_second, overhead_seconds
        )
    else:
        break_blind = break_pair = break_eng = None

    return BoundReport(
        params=params,
        guess_uniform=guess_prob_uniform(params),
        guess_after_pair=guess_prob_after_pair(params),
        guess_partial=guess_prob_partial(params),
        average_before_tag=average_success_before_tag(params),
        min_entropy_bits=min_entropy_of_elimination(params),
        chebyshev_asymptotic=chebyshev_bound(params, mode="asymptotic"),
        engineered=engineered,
        mean_intersection=mean,
        var_intersection=variance,
        weak_pair_exact=weak,
        chebyshev_exact=cheb,
        rounds_per_second=rounds_per_second,
        overhead_seconds=overhead_seconds,
        break_blind=break_blind,
        break_after_pair=break_pair,
        break_engineered=break_eng,
    )
