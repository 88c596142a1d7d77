"""Double-slit interferometry with internal which-path labels.

A particle in path superposition c1|p1> + c2|p2> carries an internal state
that evolves into |psi_m1> or |psi_m2> depending on the path.  Sweeping the
analyzer phase delta of the projector onto (|p1> + e^{i delta}|p2>)/sqrt(2)
traces an interference pattern.  Three stages are modelled:

* ``initial``        -- no labelling, pattern of the bare path state,
* ``labelled``       -- which-path labels reduce visibility and shift the
                        constructive phase by arg<psi_m1|psi_m2>,
* ``post_selected``  -- conditioning the internal state on |psi_f> revives
                        visibility and adds the Pancharatnam phase of the
                        triple (psi_m1, psi_f, psi_m2).

Post-selected probabilities are joint (success AND detection); the
conditional pattern is available separately.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import MissingPostSelection, ZeroVisibility
from .states import PureState, inner_product, wrap_phase

STAGES = ("initial", "labelled", "post_selected")

#: fringe cross terms below this magnitude give no usable constructive phase.
VISIBILITY_TOL = 1e-10


@dataclass(frozen=True)
class PathState:
    """Normalized path amplitudes (c1, c2) of the two-arm superposition."""

    c1: complex
    c2: complex

    def __post_init__(self):
        a = complex(self.c1)
        b = complex(self.c2)
        norm = math.hypot(abs(a), abs(b))
        if norm < 1e-300:
            raise ValueError("cannot normalize a zero path state")
        object.__setattr__(self, "c1", a / norm)
        object.__setattr__(self, "c2", b / norm)


@dataclass(frozen=True)
class EraserScenario:
    """One interferometer run: path amplitudes, the initial internal state,
    the two which-path labels, and an optional post-selection.

    The labels are taken as given; how psi_i evolves into them is left to
    the labelling channel and does not enter any fringe formula.  Labels
    are allowed to be orthogonal (fully distinguishing): the pattern is
    then flat and the phase-extraction operations raise
    :class:`ZeroVisibility` instead.
    """

    path: PathState
    psi_i: PureState
    psi_m1: PureState
    psi_m2: PureState
    psi_f: PureState | None = None


def _cross_term(s: EraserScenario, stage: str) -> complex:
    """Coefficient K of the e^{-i delta} fringe term at the given stage."""
    k = s.path.c1.conjugate() * s.path.c2
    if stage == "initial":
        return k
    if stage == "labelled":
        return k * inner_product(s.psi_m1, s.psi_m2)
    if stage == "post_selected":
        if s.psi_f is None:
            raise MissingPostSelection("scenario has no psi_f")
        return k * inner_product(s.psi_m1, s.psi_f) * inner_product(s.psi_f, s.psi_m2)
    raise ValueError(f"unknown stage {stage!r}; expected one of {STAGES}")


def _baseline(s: EraserScenario, stage: str) -> float:
    """Delta-independent part 0.5*(|c1'|^2 + |c2'|^2) of the pattern."""
    if stage == "post_selected":
        if s.psi_f is None:
            raise MissingPostSelection("scenario has no psi_f")
        w1 = abs(s.path.c1 * inner_product(s.psi_f, s.psi_m1)) ** 2
        w2 = abs(s.path.c2 * inner_product(s.psi_f, s.psi_m2)) ** 2
        return 0.5 * (w1 + w2)
    return 0.5 * (abs(s.path.c1) ** 2 + abs(s.path.c2) ** 2)


def fringe_probability(s: EraserScenario, delta: float, stage: str) -> float:
    """Detection probability at analyzer phase delta.

    For ``post_selected`` this is the joint probability of passing the
    post-selection and being detected (not renormalized); see
    :func:`fringe_probability_conditional` for the conditional pattern.
    """
    k = _cross_term(s, stage)
    rot = k * cmath.exp(-1j * delta)
    return _baseline(s, stage) + rot.real


def postselection_probability(s: EraserScenario) -> float:
    """Probability that the internal post-selection succeeds."""
    if s.psi_f is None:
        raise MissingPostSelection("scenario has no psi_f")
    return 2.0 * _baseline(s, "post_selected")


def fringe_probability_conditional(s: EraserScenario, delta: float) -> float:
    """Post-selected pattern renormalized by the success probability."""
    return fringe_probability(s, delta, "post_selected") / postselection_probability(s)


def visibility(s: EraserScenario, stage: str) -> float:
    """(P_max - P_min) / (P_max + P_min) of the stage's fringe pattern."""
    base = _baseline(s, stage)
    if base <= 0.0:
        raise ZeroVisibility(f"pattern vanishes identically at stage {stage!r}")
    return abs(_cross_term(s, stage)) / base


def constructive_phase_analytic(s: EraserScenario, stage: str) -> float:
    """Analyzer phase maximizing the pattern, in (-pi, pi]:

    * initial:        arg(conj(c1) c2)
    * labelled:       + arg<psi_m1|psi_m2>
    * post_selected:  + arg[<psi_m1|psi_f><psi_f|psi_m2>]
    """
    k = _cross_term(s, stage)
    if abs(k) < VISIBILITY_TOL:
        raise ZeroVisibility(
            f"fringe cross term magnitude {abs(k):.3e} at stage {stage!r} "
            f"is below {VISIBILITY_TOL:.0e}"
        )
    return wrap_phase(cmath.phase(k))


def constructive_phase_scan(s: EraserScenario, stage: str, n_grid: int) -> float:
    """Constructive phase found by sweeping delta over a uniform grid.

    Takes the argmax over ``n_grid`` points on (-pi, pi] and refines it by
    one parabolic interpolation through the argmax point and its cyclic
    neighbours; for the sinusoidal patterns produced here the result agrees
    with :func:`constructive_phase_analytic` to better than 2 pi/n_grid^2.

    Serves as a numerical oracle independent of the analytic arg formulas.
    """
    if n_grid < 16:
        raise ValueError(f"n_grid must be >= 16, got {n_grid}")
    step = 2.0 * math.pi / n_grid
    deltas = [-math.pi + step * (j + 1) for j in range(n_grid)]
    values = [fringe_probability(s, d, stage) for d in deltas]
    amplitude = 0.5 * (max(values) - min(values))
    if amplitude < VISIBILITY_TOL:
        raise ZeroVisibility(
            f"fringe amplitude {amplitude:.3e} at stage {stage!r} is below "
            f"{VISIBILITY_TOL:.0e}; argmax is meaningless"
        )
    j = values.index(max(values))
    y_prev = values[(j - 1) % n_grid]
    y_next = values[(j + 1) % n_grid]
    curv = y_prev - 2.0 * values[j] + y_next
    offset = 0.0
    if curv < 0.0:
        offset = 0.5 * step * (y_prev - y_next) / curv
    return wrap_phase(deltas[j] + offset)


def labelling_shift(s: EraserScenario) -> float:
    """Fringe shift arg<psi_m1|psi_m2> caused by the which-path labelling;
    independent of the path amplitudes."""
    bracket = inner_product(s.psi_m1, s.psi_m2)
    if abs(bracket) < VISIBILITY_TOL:
        raise ZeroVisibility(
            f"|<psi_m1|psi_m2>| = {abs(bracket):.3e} is below "
            f"{VISIBILITY_TOL:.0e}; the labelled pattern is flat"
        )
    return wrap_phase(cmath.phase(bracket))


def eraser_shift(s: EraserScenario) -> float:
    """Additional fringe shift caused by the post-selection:

        arg[<psi_m1|psi_f><psi_f|psi_m2><psi_m2|psi_m1>]

    This is the Pancharatnam phase of (psi_m1, psi_f, psi_m2) and equals
    the constructive-phase difference between the post-selected and
    labelled stages; it is independent of the path amplitudes.
    """
    if s.psi_f is None:
        raise MissingPostSelection("scenario has no psi_f")
    from .states import pancharatnam_phase

    return pancharatnam_phase(s.psi_m1, s.psi_f, s.psi_m2)
