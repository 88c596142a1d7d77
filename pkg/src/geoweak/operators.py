"""Hermitian observables, weak values, and momentum-conditioned evolution.

The interaction couples an observable A to the transverse momentum, so a
path labelled by momentum p rotates the internal state by the unitary
exp(-i G p A / hbar).  The 2x2 exponential is evaluated in closed form
through the Pauli decomposition A = a0*I + avec.sigma, which is exact and
branch-free:

    exp(-i phi A) = e^{-i phi a0} [cos(phi |avec|) I
                                   - i sin(phi |avec|) (ahat.sigma)]
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBracket, OrthogonalSelection
from .states import PureState, inner_product, wrap_phase

#: below this overlap magnitude the weak value is treated as divergent.
ORTHOGONALITY_TOL = 1e-12

#: bracket magnitudes below this make an extracted phase meaningless.
BRACKET_TOL = 1e-10

_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True, eq=False)
class Observable:
    """2x2 Hermitian matrix in the {|+>, |->} basis."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"observable must be 2x2, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("observable must be Hermitian to 1e-12")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "Observable":
        return cls(np.eye(2))

    @classmethod
    def sigma_x(cls) -> "Observable":
        """The flip operator |+><-| + |-><+|."""
        return cls(_SIGMA[0])

    @classmethod
    def sigma_y(cls) -> "Observable":
        return cls(_SIGMA[1])

    @classmethod
    def sigma_z(cls) -> "Observable":
        return cls(_SIGMA[2])

    def pauli_split(self) -> tuple[float, np.ndarray]:
        """Coefficients (a0, avec) of A = a0*I + avec.sigma; all real."""
        m = self.matrix
        a0 = 0.5 * (m[0, 0] + m[1, 1]).real
        ax = m[0, 1].real
        ay = -m[0, 1].imag
        az = 0.5 * (m[0, 0] - m[1, 1]).real
        return a0, np.array([ax, ay, az])

    def spectral_radius(self) -> float:
        """max |eigenvalue|; the eigenvalues are a0 +/- |avec|."""
        a0, avec = self.pauli_split()
        r = float(np.linalg.norm(avec))
        return max(abs(a0 + r), abs(a0 - r))


@dataclass(frozen=True)
class CouplingSpec:
    """Impulsive coupling strength G = g*tau and the hbar scale."""

    G: float
    hbar: float = 1.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")


def expectation(A: Observable, psi: PureState) -> float:
    """<psi|A|psi>; real for Hermitian A."""
    v = psi.vector
    return float(np.vdot(v, A.matrix @ v).real)


def weak_value(A: Observable, psi_i: PureState, psi_f: PureState) -> complex:
    """<psi_f|A|psi_i> / <psi_f|psi_i>.

    May lie far outside the eigenvalue range when the selection overlap is
    small.  Raises :class:`OrthogonalSelection` below ``ORTHOGONALITY_TOL``.
    """
    overlap = inner_product(psi_f, psi_i)
    if abs(overlap) < ORTHOGONALITY_TOL:
        raise OrthogonalSelection(
            f"|<psi_f|psi_i>| = {abs(overlap):.3e} is below "
            f"{ORTHOGONALITY_TOL:.0e}; the weak value diverges"
        )
    return complex(np.vdot(psi_f.vector, A.matrix @ psi_i.vector)) / overlap


def evolution_matrix(A: Observable, c: CouplingSpec, p: float) -> np.ndarray:
    """Unitary exp(-i G p A / hbar) as an explicit 2x2 matrix."""
    angle = c.G * p / c.hbar
    a0, avec = A.pauli_split()
    r = float(np.linalg.norm(avec))
    u = cmath.exp(-1j * angle * a0) * (
        math.cos(angle * r) * np.eye(2, dtype=complex)
    )
    if r > 0.0:
        ahat = avec / r
        gen = ahat[0] * _SIGMA[0] + ahat[1] * _SIGMA[1] + ahat[2] * _SIGMA[2]
        u = u - cmath.exp(-1j * angle * a0) * 1j * math.sin(angle * r) * gen
    return u


def evolve(A: Observable, c: CouplingSpec, p: float, psi: PureState) -> PureState:
    """Internal state after the momentum-p path: exp(-i G p A / hbar)|psi>."""
    return PureState.from_vector(evolution_matrix(A, c, p) @ psi.vector)


def theta1(A: Observable, c: CouplingSpec, psi_i: PureState, p: float) -> float:
    """Exact phase arg<psi_m(0)|psi_m(p)> picked up between the p = 0 and
    p momentum paths by the labelling alone (the dynamical phase).

    Its slope at p = 0 is -G<A>/hbar.
    """
    bracket = complex(np.vdot(psi_i.vector,
                              evolution_matrix(A, c, p) @ psi_i.vector))
    if abs(bracket) < BRACKET_TOL:
        raise DegenerateBracket(
            f"|<psi_m(0)|psi_m(p)>| = {abs(bracket):.3e} at p = {p}; "
            "phase undefined"
        )
    return wrap_phase(cmath.phase(bracket))


def theta2(A: Observable, c: CouplingSpec, psi_i: PureState,
           psi_f: PureState, p: float) -> float:
    """Exact Pancharatnam phase added by post-selection between the p = 0
    and p momentum paths:

        arg[<psi_i|psi_f><psi_f|psi_m(p)><psi_m(p)|psi_i>]

    with |psi_m(p)> = exp(-i G p A / hbar)|psi_i>.  Its slope at p = 0 is
    -G(Re weak_value - <A>)/hbar.
    """
    psi_m = evolution_matrix(A, c, p) @ psi_i.vector
    b1 = inner_product(psi_i, psi_f)
    b2 = complex(np.vdot(psi_f.vector, psi_m))
    b3 = complex(np.vdot(psi_m, psi_i.vector))
    for name, val in (("<psi_i|psi_f>", b1),
                      ("<psi_f|psi_m(p)>", b2),
                      ("<psi_m(p)|psi_i>", b3)):
        if abs(val) < BRACKET_TOL:
            raise DegenerateBracket(
                f"|{name}| = {abs(val):.3e} at p = {p}; phase undefined"
            )
    return wrap_phase(cmath.phase(b1 * b2 * b3))


def random_observable(rng: np.random.Generator, scale: float = 1.0) -> Observable:
    """Random Hermitian observable with Pauli coefficients uniform in
    [-scale, scale] (a0 first, then avec)."""
    a0, ax, ay, az = rng.uniform(-scale, scale, size=4)
    m = a0 * np.eye(2, dtype=complex) + ax * _SIGMA[0] + ay * _SIGMA[1] + az * _SIGMA[2]
    return Observable(m)
