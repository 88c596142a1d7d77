"""Brute-force weak-measurement pipeline with a Gaussian momentum probe.

The probe wavepacket phi_i(p) rides an interferometer whose paths are the
momentum eigenstates.  Each path rotates the internal state by
exp(-i G p A / hbar); projecting the internal state onto psi_f leaves the
post-selected packet

    phi_f(p) = <psi_f| exp(-i G p A / hbar) |psi_i> phi_i(p).

The pointer position is read directly in momentum space through
<x> = Re integral phi_f^*(p) (i hbar d/dp phi_f)(p) dp / ||phi_f||^2,
which avoids any Fourier convention and reduces to the phase gradient for
slowly varying packets.  The analytic counterparts are the first-order
displacements

    dx1 = G <A>                     (labelling alone)
    dx2 = G (Re A_w - <A>)          (added by post-selection)
    dx  = dx1 + dx2 = G Re A_w

valid while the packet sits inside the linear region of the post-selection
phase, i.e. while the weakness ratio (delta_p/hbar) G |Re A_w| stays small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateBracket,
    GridTooCoarse,
    OrthogonalSelection,
    PostSelectionVanished,
)
from .operators import (
    ORTHOGONALITY_TOL,
    _SIGMA,
    CouplingSpec,
    Observable,
    expectation,
    theta2,
    weak_value,
)
from .states import PureState, inner_product

#: post-selection success probabilities below this abort the readout.
SUCCESS_TOL = 1e-12

#: maximum tolerated phase advance of phi_f per grid step (aliasing guard).
MAX_PHASE_STEP = math.pi / 4.0


@dataclass(frozen=True, eq=False)
class GaussianProbe:
    """Momentum-space probe packet on a uniform grid.

    ``delta_p`` is the standard deviation of |amplitude|^2, which for the
    :meth:`gaussian` factory means amplitudes proportional to
    exp(-(p - p_center)^2 / (4 delta_p^2)).  The discrete norm
    sum |amp|^2 dp must be 1 and the grid must span at least
    [p_center - 6 delta_p, p_center + 6 delta_p].
    """

    p_grid: np.ndarray
    amplitudes: np.ndarray
    delta_p: float
    p_center: float = 0.0

    def __post_init__(self):
        p = np.asarray(self.p_grid, dtype=float)
        amp = np.asarray(self.amplitudes, dtype=complex)
        if p.ndim != 1 or p.size < 8 or amp.shape != p.shape:
            raise ValueError("p_grid and amplitudes must be matching 1-d arrays")
        steps = np.diff(p)
        if steps[0] <= 0 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ValueError("p_grid must be uniformly spaced and increasing")
        if not self.delta_p > 0:
            raise ValueError(f"delta_p must be positive, got {self.delta_p}")
        norm = float(np.sum(np.abs(amp) ** 2) * steps[0])
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"discrete norm is {norm!r}, expected 1 within 1e-9")
        slack = 1e-9 * self.delta_p
        if p[0] > self.p_center - 6.0 * self.delta_p + slack or \
           p[-1] < self.p_center + 6.0 * self.delta_p - slack:
            raise ValueError("grid must span at least p_center +/- 6 delta_p")
        p.flags.writeable = False
        amp.flags.writeable = False
        object.__setattr__(self, "p_grid", p)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "delta_p", float(self.delta_p))
        object.__setattr__(self, "p_center", float(self.p_center))

    @property
    def step(self) -> float:
        return float(self.p_grid[1] - self.p_grid[0])

    @classmethod
    def gaussian(cls, delta_p: float, n_points: int = 4096, span: float = 8.0,
                 p_center: float = 0.0) -> "GaussianProbe":
        """Gaussian packet sampled on ``n_points`` points covering
        p_center +/- span*delta_p (span defaults to 8)."""
        if not delta_p > 0:
            raise ValueError(f"delta_p must be positive, got {delta_p}")
        if span < 6.0:
            raise ValueError(f"span must be >= 6 (grid invariant), got {span}")
        p = np.linspace(p_center - span * delta_p, p_center + span * delta_p, n_points)
        amp = np.exp(-((p - p_center) ** 2) / (4.0 * delta_p ** 2)).astype(complex)
        amp /= math.sqrt(float(np.sum(np.abs(amp) ** 2) * (p[1] - p[0])))
        return cls(p, amp, delta_p, p_center)


@dataclass(frozen=True, eq=False)
class WeakScenario:
    """One weak-measurement run: selections, observable, coupling, probe."""

    psi_i: PureState
    psi_f: PureState
    A: Observable
    coupling: CouplingSpec
    probe: GaussianProbe

    def __post_init__(self):
        overlap = abs(inner_product(self.psi_f, self.psi_i))
        if overlap < ORTHOGONALITY_TOL:
            raise OrthogonalSelection(
                f"|<psi_f|psi_i>| = {overlap:.3e} is below {ORTHOGONALITY_TOL:.0e}"
            )

    @classmethod
    def spin_flip(cls, theta: float, G: float, hbar: float = 1.0,
                  delta_p: float = 0.1, n_points: int = 4096,
                  span: float = 8.0) -> "WeakScenario":
        """Standard two-state example: weakly measure the flip operator
        sigma_x with pre-selection |+> and post-selection
        sin(theta)|+> + cos(theta)|->, whose weak value is 1/tan(theta)."""
        return cls(
            psi_i=PureState.plus(),
            psi_f=PureState(math.sin(theta), math.cos(theta)),
            A=Observable.sigma_x(),
            coupling=CouplingSpec(G, hbar),
            probe=GaussianProbe.gaussian(delta_p, n_points, span),
        )


@dataclass(frozen=True)
class PointerResult:
    """Pointer displacement readout of one scenario.

    ``dx_analytic == dx1 + dx2`` holds by construction.
    """

    dx_simulated: float
    dx_analytic: float
    dx1: float
    dx2: float
    success_probability: float
    weakness_ratio: float


def displacement_labelled(s: WeakScenario) -> float:
    """First-order pointer displacement from the labelling alone: G<A>."""
    return s.coupling.G * expectation(s.A, s.psi_i)


def displacement_postselected(s: WeakScenario) -> float:
    """First-order displacement added by post-selection:
    G(Re weak_value - <A>)."""
    wv = weak_value(s.A, s.psi_i, s.psi_f)
    return s.coupling.G * (wv.real - expectation(s.A, s.psi_i))


def weakness_ratio(s: WeakScenario) -> float:
    """(delta_p/hbar) * G * |Re weak_value|; the linear-phase regime needs
    this to be much smaller than 1."""
    wv = weak_value(s.A, s.psi_i, s.psi_f)
    return s.probe.delta_p / s.coupling.hbar * abs(s.coupling.G * wv.real)


def _postselection_bracket(s: WeakScenario, p: np.ndarray) -> np.ndarray:
    """<psi_f| exp(-i G p A / hbar) |psi_i> evaluated over a grid of p."""
    a0, avec = s.A.pauli_split()
    r = float(np.linalg.norm(avec))
    angle = s.coupling.G * p / s.coupling.hbar
    overlap = inner_product(s.psi_f, s.psi_i)
    if r == 0.0:
        return np.exp(-1j * angle * a0) * overlap
    ahat = avec / r
    vi = s.psi_i.vector
    vf = s.psi_f.vector
    gen = ahat[0] * _SIGMA[0] + ahat[1] * _SIGMA[1] + ahat[2] * _SIGMA[2]
    cross = complex(np.vdot(vf, gen @ vi))
    return np.exp(-1j * angle * a0) * (
        np.cos(angle * r) * overlap - 1j * np.sin(angle * r) * cross
    )


def postselected_amplitudes(s: WeakScenario, normalized: bool = True) -> np.ndarray:
    """Post-selected momentum amplitudes phi_f on the probe grid."""
    phi_f = _postselection_bracket(s, s.probe.p_grid) * s.probe.amplitudes
    if normalized:
        norm = math.sqrt(float(np.sum(np.abs(phi_f) ** 2) * s.probe.step))
        if norm < math.sqrt(SUCCESS_TOL):
            raise PostSelectionVanished(
                f"post-selected norm {norm:.3e} too small to renormalize"
            )
        phi_f = phi_f / norm
    return phi_f


def _derivative(phi: np.ndarray, h: float) -> np.ndarray:
    """Second-order central differences, one-sided at the grid ends."""
    d = np.empty_like(phi)
    d[1:-1] = (phi[2:] - phi[:-2]) / (2.0 * h)
    d[0] = (phi[1] - phi[0]) / h
    d[-1] = (phi[-1] - phi[-2]) / h
    return d


def simulate_pointer(s: WeakScenario) -> PointerResult:
    """Run the full wavepacket pipeline and compare with the closed forms.

    Checks that the post-selection retains enough norm and that the phase of
    phi_f advances by at most pi/4 per grid step (otherwise the discrete
    derivative would alias); raises :class:`PostSelectionVanished` or
    :class:`GridTooCoarse` respectively.
    """
    probe = s.probe
    h = probe.step
    hbar = s.coupling.hbar
    phi_i = probe.amplitudes
    phi_f = _postselection_bracket(s, probe.p_grid) * phi_i

    norm_i = float(np.sum(np.abs(phi_i) ** 2) * h)
    norm_f = float(np.sum(np.abs(phi_f) ** 2) * h)
    success = norm_f / norm_i
    if success < SUCCESS_TOL:
        raise PostSelectionVanished(
            f"success probability {success:.3e} is below {SUCCESS_TOL:.0e}"
        )

    phase_steps = np.angle(phi_f[1:] * np.conj(phi_f[:-1]))
    worst = float(np.max(np.abs(phase_steps)))
    if worst > MAX_PHASE_STEP:
        raise GridTooCoarse(
            f"phase of phi_f advances up to {worst:.3f} rad per grid step "
            f"(limit {MAX_PHASE_STEP:.3f}); increase n_points or reduce the "
            "coupling"
        )

    d_phi_f = _derivative(phi_f, h)
    dx_simulated = float(
        np.sum(np.conj(phi_f) * (1j * hbar) * d_phi_f).real * h / norm_f
    )

    dx1 = displacement_labelled(s)
    dx2 = displacement_postselected(s)
    return PointerResult(
        dx_simulated=dx_simulated,
        dx_analytic=dx1 + dx2,
        dx1=dx1,
        dx2=dx2,
        success_probability=success,
        weakness_ratio=weakness_ratio(s),
    )


def theta2_profile(s: WeakScenario, p_samples) -> list[tuple[float, float]]:
    """Exact post-selection phase at each requested momentum.

    Samples where a bracket degenerates (phase undefined) are skipped; the
    returned list keeps only well-defined (p, phase) pairs.
    """
    out: list[tuple[float, float]] = []
    for p in np.asarray(p_samples, dtype=float):
        try:
            out.append((float(p), theta2(s.A, s.coupling, s.psi_i, s.psi_f, float(p))))
        except DegenerateBracket:
            continue
    return out
