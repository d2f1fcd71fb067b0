"""Scalar criteria and bounds for dropout robustness.

The A-criterion summarizes an information matrix by the harmonic mean
of its nonzero eigenvalues.  Loss compares a planned design against the
design actually implemented after dropout; the worst case over all
m-tail dropout patterns is the truncated (minimal) design, whose
spectrum admits explicit lower bounds theta_L (any balanced design)
and theta_L_star (designs with single-cycle tail permutations).  Those
translate into upper bounds on the maximum loss (UML, UML_star) and
lower bounds on the A-efficiency of the truncated design (EL, EL_star).
For the two fully replicated one-square and two-square families the
truncated spectrum is known exactly on the Fourier basis, giving exact
maximum loss and efficiency numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .designs import CrossoverDesign, truncate
from .info import direct_info_complete
from .linalg import SpectralSummary, eigensym


@dataclass(frozen=True)
class ACriterion:
    """Harmonic-mean summary of a direct-effect information matrix.

    trace_mp is the trace of the Moore-Penrose inverse; h is the
    harmonic criterion (t-1)/trace_mp when all contrasts are estimable,
    reported as 0.0 with connected=False otherwise.
    """

    h: float
    trace_mp: float
    connected: bool
    rank: int
    spectrum: SpectralSummary


@dataclass(frozen=True)
class BoundsReport:
    """All closed-form bounds for one (t, m)."""

    t: int
    m: int
    theta_l: float
    theta_l_star: float
    uml: float
    uml_star: float
    mtr: float
    el: float
    el_star: float
    condition_value: float
    condition_satisfied: bool
    t_star: int


@dataclass(frozen=True)
class MaxLoss:
    """Maximum precision loss of a design under m-tail dropout."""

    value: float
    disconnected: bool
    plan_trace_mp: float
    min_trace_mp: float | None


def a_criterion(c_d: np.ndarray, t: int) -> ACriterion:
    """A-criterion of a direct-effect information matrix.

    The design is connected (all treatment contrasts estimable) exactly
    when the rank is t-1; the harmonic criterion is then
    (t-1)/trace_mp, and 0.0 with a disconnected flag otherwise.
    """
    s = eigensym(c_d)
    connected = s.rank == t - 1
    h = (t - 1) / s.trace_mp if connected and s.trace_mp > 0 else 0.0
    return ACriterion(
        h=h, trace_mp=s.trace_mp, connected=connected, rank=s.rank, spectrum=s
    )


def loss(plan_trace_mp: float, imp_trace_mp: float) -> float:
    """Precision loss of an implemented design against the plan.

    One minus the ratio of planned to implemented Moore-Penrose traces;
    zero when nothing is lost, approaching one as the implemented
    design degrades.  Both traces must be positive.
    """
    if plan_trace_mp <= 0 or imp_trace_mp <= 0:
        raise ValueError("traces must be positive")
    return 1.0 - plan_trace_mp / imp_trace_mp


def max_loss(design: CrossoverDesign, m: int) -> MaxLoss:
    """Maximum loss of a design under m-tail dropout.

    Compares the planned design with its truncation; a disconnected
    truncation is reported as loss 1.0 with the flag set rather than an
    error, so sweeping over many (t, m) never aborts.
    """
    plan = a_criterion(direct_info_complete(design), design.t)
    mini = a_criterion(direct_info_complete(truncate(design, m)), design.t)
    if not mini.connected:
        return MaxLoss(
            value=1.0,
            disconnected=True,
            plan_trace_mp=plan.trace_mp,
            min_trace_mp=None,
        )
    return MaxLoss(
        value=loss(plan.trace_mp, mini.trace_mp),
        disconnected=False,
        plan_trace_mp=plan.trace_mp,
        min_trace_mp=mini.trace_mp,
    )


def _check_t_m(t: int, m: int) -> None:
    if m < 1:
        raise ValueError(f"requires m >= 1, got m={m}")
    if t < 2 * m + 2:
        raise ValueError(f"requires t >= 2m+2, got t={t}, m={m}")


def theta_lower(t: int, m: int) -> float:
    """Spectral lower bound for the truncated design of any balanced layout.

    theta_L(t, m) = (t/(t-m)) [ (t-2m) - t(m+1)^2 / D ] with
    D = (t-m)^2 - (t+1) - m(m+1); requires t >= 2m+2.
    """
    _check_t_m(t, m)
    d = (t - m) ** 2 - (t + 1) - m * (m + 1)
    return (t / (t - m)) * ((t - 2 * m) - t * (m + 1) ** 2 / d)


def theta_lower_star(t: int, m: int) -> float:
    """Sharper spectral lower bound for single-cycle tail permutations.

    Replaces the worst-case coincidence alignment by the extremal value
    cos(2 pi / t) available to a full-cycle permutation.
    """
    _check_t_m(t, m)
    d = (t - m) ** 2 - (t + 1) - m * (m + 1)
    psi1 = math.cos(2 * math.pi / t)
    return (t / (t - m)) * (
        (t - 2 * m)
        + (m * (m - 1) / t) * (1 - psi1)
        - t * (1 + 2 * psi1 * m + m * m) / d
    )


def uml(t: int, m: int, star: bool = False) -> float:
    """Upper bound on the maximum loss under m-tail dropout.

    UML(t, m) = 1 - (t^2-t-1) theta / (t(t-2)(t+1)) with theta the
    plain or starred spectral lower bound.
    """
    theta = theta_lower_star(t, m) if star else theta_lower(t, m)
    return 1.0 - (t * t - t - 1) * theta / (t * (t - 2) * (t + 1))


def connect_condition(t: int, m: int) -> tuple[float, bool]:
    """Connectedness condition for the truncated design.

    Returns the value of (t-2m) D - t(m+1)^2 with
    D = (t-m)^2 - (t+1) - m(m+1), and whether it is positive.  Positive
    value guarantees every treatment contrast stays estimable after the
    worst-case m-tail dropout.
    """
    if m < 1:
        raise ValueError(f"requires m >= 1, got m={m}")
    d = (t - m) ** 2 - (t + 1) - m * (m + 1)
    value = (t - 2 * m) * d - t * (m + 1) ** 2
    return float(value), value > 0


def t_star(m: int) -> int:
    """Smallest t >= 2m+2 whose truncated design is guaranteed connected."""
    if m < 1:
        raise ValueError(f"requires m >= 1, got m={m}")
    t = 2 * m + 2
    while True:
        _, ok = connect_condition(t, m)
        if ok:
            return t
        t += 1


def mtr(t: int, m: int) -> float:
    """Maximum possible trace of the truncated design's information.

    MTr(t, m) = t(t-m-1) - (t(t-m-1)+1)/((t-m)(t-m-1)), the ceiling
    used to normalize efficiency bounds.
    """
    _check_t_m(t, m)
    w = t * (t - m - 1)
    return w - (w + 1) / ((t - m) * (t - m - 1))


def efficiency_bounds(t: int, m: int) -> tuple[float, float]:
    """A-efficiency lower bounds (plain, starred) for the truncated design.

    EL = (t-1) theta_L / MTr and likewise with the starred theta.
    """
    denom = mtr(t, m)
    return (
        (t - 1) * theta_lower(t, m) / denom,
        (t - 1) * theta_lower_star(t, m) / denom,
    )


def bounds_report(t: int, m: int) -> BoundsReport:
    """All (t, m) bounds in one bundle; requires t >= 2m+2."""
    el, el_star = efficiency_bounds(t, m)
    value, ok = connect_condition(t, m)
    return BoundsReport(
        t=t,
        m=m,
        theta_l=theta_lower(t, m),
        theta_l_star=theta_lower_star(t, m),
        uml=uml(t, m, star=False),
        uml_star=uml(t, m, star=True),
        mtr=mtr(t, m),
        el=el,
        el_star=el_star,
        condition_value=value,
        condition_satisfied=ok,
        t_star=t_star(m),
    )


def class_ab_spectrum(t: int, klass: str) -> list[float]:
    """Per-frequency eigenvalue factors of the truncated one-period design.

    For replicated single-square designs ("A") and replicated
    complementary-pair designs ("B"), the truncated information is a
    circulant on the Fourier basis of the tail cycle; the eigenvalues of
    the information matrix are g times these factors, for frequencies
    r = 1..t-1 with psi_r = cos(2 pi r / t):

        A: theta_r = (t/(t-1)) [ t-2 - 2t(1+psi_r) / (t(t-3) - 2 psi_r) ]
        B: theta_r = (t/(t-1)) [ t-2 - t(1+psi_r)^2 / (t(t-3) - 2 psi_r) ]
    """
    if klass not in ("A", "B"):
        raise ValueError(f'class must be "A" or "B", got {klass!r}')
    if t < 4:
        raise ValueError(f"requires t >= 4, got t={t}")
    out: list[float] = []
    for r in range(1, t):
        psi = math.cos(2 * math.pi * r / t)
        denom = t * (t - 3) - 2 * psi
        if klass == "A":
            val = (t / (t - 1)) * ((t - 2) - 2 * t * (1 + psi) / denom)
        else:
            val = (t / (t - 1)) * ((t - 2) - t * (1 + psi) ** 2 / denom)
        out.append(val)
    return out


def _inv_sum_harmonic(t: int, klass: str) -> float:
    spectrum = class_ab_spectrum(t, klass)
    if any(v <= 0 for v in spectrum):
        raise ValueError(f"truncated design is disconnected for t={t}")
    return 1.0 / sum(1.0 / v for v in spectrum)


def class_ab_ml(t: int, klass: str) -> float:
    """Exact maximum loss for the replicated square or pair families.

    ML = 1 - ((t-1)(t^2-t-1)/(t(t-2)(t+1))) (sum_r 1/theta_r)^{-1};
    requires t >= 5 (the t=4 truncation is disconnected).
    """
    if t < 5:
        raise ValueError(f"requires t >= 5, got t={t} (truncation disconnected)")
    return 1.0 - ((t - 1) * (t * t - t - 1) / (t * (t - 2) * (t + 1))) * (
        _inv_sum_harmonic(t, klass)
    )


def el_ab(t: int, klass: str) -> float:
    """Exact A-efficiency of the truncated square or pair families.

    EL_AB = ((t-1)^2 / MTr(t, 1)) (sum_r 1/theta_r)^{-1}; requires
    t >= 5.
    """
    if t < 5:
        raise ValueError(f"requires t >= 5, got t={t} (truncation disconnected)")
    return ((t - 1) ** 2 / mtr(t, 1)) * _inv_sum_harmonic(t, klass)


def extreme_ml(t: int) -> float:
    """Maximum loss of the all-sequences design under one-period dropout.

    The truncated all-sequences design has completely symmetric
    information with contrast eigenvalue proportional to
    a = (t^4 - 5t^3 + 6t^2 + t - 2)/(t^3 - 4t^2 + 3t + 2), giving
    ML = 1 - a (t^2-t-1) / ((t-1)^2 (t+1)).
    """
    if t < 4:
        raise ValueError(f"requires t >= 4, got t={t}")
    a = (t**4 - 5 * t**3 + 6 * t**2 + t - 2) / (t**3 - 4 * t**2 + 3 * t + 2)
    return 1.0 - a * (t * t - t - 1) / ((t - 1) ** 2 * (t + 1))


def efficiency_lower_bound(min_trace_mp: float, t: int, m: int, g: int) -> float:
    """A-efficiency floor from a measured truncated-design trace.

    EFF >= (t-1)^2 / (g MTr(t, m) trace_mp); valid when the truncated
    design is connected.
    """
    if min_trace_mp <= 0:
        raise ValueError("trace of the Moore-Penrose inverse must be positive")
    return (t - 1) ** 2 / (g * mtr(t, m) * min_trace_mp)
