"""Pure two-level states and Bloch-sphere geometry.

Conventions used throughout the package:

* basis {|+>, |->} with |+> at the north pole (0, 0, 1) of the Bloch
  sphere and (|+> + |->)/sqrt(2) on the +x axis,
* inner products are conjugate-linear in the first argument,
  ``inner_product(a, b) = sum_k conj(a_k) b_k``,
* phases live on the branch (-pi, pi].

The Pancharatnam phase of an ordered state triple (a, b, c) is the argument
of the Bargmann invariant <a|b><b|c><c|a>.  For two-level systems it equals
minus half the signed solid angle of the geodesic triangle traversed
a -> b -> c, where the solid angle is computed here so that this identity
holds exactly: a triangle that appears counterclockwise from outside the
sphere carries negative solid angle.  (The octant triangle
|+> -> x -> y has phase +pi/4 and solid angle -pi/2.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTriangle

#: states with a pairwise overlap magnitude below this are treated as
#: orthogonal; geometric phases are undefined there and raise instead of
#: returning noise.
DEGENERACY_TOL = 1e-10

TAU = 2.0 * math.pi


def wrap_phase(phi: float) -> float:
    """Map an angle onto the branch (-pi, pi]."""
    out = math.remainder(phi, TAU)
    if out <= -math.pi:
        out += TAU
    return out


@dataclass(frozen=True)
class PureState:
    """Normalized state a|+> + b|-> of a two-level system.

    Construction normalizes the pair (a zero vector is rejected), so every
    instance satisfies |amp_plus|^2 + |amp_minus|^2 = 1.
    """

    amp_plus: complex
    amp_minus: complex

    def __post_init__(self):
        a = complex(self.amp_plus)
        b = complex(self.amp_minus)
        norm = math.hypot(abs(a), abs(b))
        if norm < 1e-300:
            raise ValueError("cannot normalize a zero state vector")
        object.__setattr__(self, "amp_plus", a / norm)
        object.__setattr__(self, "amp_minus", b / norm)

    @classmethod
    def plus(cls) -> "PureState":
        return cls(1.0, 0.0)

    @classmethod
    def minus(cls) -> "PureState":
        return cls(0.0, 1.0)

    @classmethod
    def from_vector(cls, vec) -> "PureState":
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (2,):
            raise ValueError(f"expected a length-2 vector, got shape {vec.shape}")
        return cls(vec[0], vec[1])

    @classmethod
    def from_bloch_angles(cls, polar: float, azimuth: float) -> "PureState":
        """State at polar angle ``polar`` from |+> and the given azimuth:
        cos(polar/2)|+> + e^{i azimuth} sin(polar/2)|->."""
        return cls(math.cos(polar / 2.0),
                   math.sin(polar / 2.0) * complex(math.cos(azimuth), math.sin(azimuth)))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.amp_plus, self.amp_minus], dtype=complex)

    def phase_shifted(self, phase: float) -> "PureState":
        """Same ray, multiplied by the global phase e^{i phase}."""
        g = complex(math.cos(phase), math.sin(phase))
        return PureState(g * self.amp_plus, g * self.amp_minus)


@dataclass(frozen=True)
class BlochVector:
    """Unit 3-vector image of a pure state on the Bloch sphere."""

    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def inner_product(a: PureState, b: PureState) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    return (a.amp_plus.conjugate() * b.amp_plus
            + a.amp_minus.conjugate() * b.amp_minus)


def bloch_vector(a: PureState) -> BlochVector:
    """Bloch-sphere image of a state; invariant under global phases."""
    cross = a.amp_plus.conjugate() * a.amp_minus
    return BlochVector(
        2.0 * cross.real,
        2.0 * cross.imag,
        abs(a.amp_plus) ** 2 - abs(a.amp_minus) ** 2,
    )


def _check_nondegenerate(a: PureState, b: PureState, c: PureState):
    """Return the three cyclic brackets, raising if any is near zero."""
    ab = inner_product(a, b)
    bc = inner_product(b, c)
    ca = inner_product(c, a)
    for name, val in (("<a|b>", ab), ("<b|c>", bc), ("<c|a>", ca)):
        if abs(val) < DEGENERACY_TOL:
            raise DegenerateTriangle(
                f"|{name}| = {abs(val):.3e} is below {DEGENERACY_TOL:.0e}; "
                "the geometric phase is undefined near orthogonality"
            )
    return ab, bc, ca


def pancharatnam_phase(a: PureState, b: PureState, c: PureState) -> float:
    """arg[<a|b><b|c><c|a>] on (-pi, pi].

    Gauge invariant: independent of the global phase of each argument.
    Raises :class:`DegenerateTriangle` when a bracket magnitude falls
    below ``DEGENERACY_TOL``.
    """
    ab, bc, ca = _check_nondegenerate(a, b, c)
    return wrap_phase(math.atan2((ab * bc * ca).imag, (ab * bc * ca).real))


def solid_angle(a: PureState, b: PureState, c: PureState) -> float:
    """Signed solid angle of the geodesic triangle a -> b -> c.

    Computed from the Bloch vectors alone via the half-angle formula
    tan(Omega/2) = -u.(v x w) / (1 + u.v + v.w + w.u), which is independent
    of the bracket route used by :func:`pancharatnam_phase`.  The sign is
    oriented so that pancharatnam_phase(a, b, c) = -Omega/2 modulo 2 pi.
    """
    _check_nondegenerate(a, b, c)
    u = bloch_vector(a).as_array()
    v = bloch_vector(b).as_array()
    w = bloch_vector(c).as_array()
    triple = float(np.dot(u, np.cross(v, w)))
    denom = 1.0 + float(u @ v) + float(v @ w) + float(w @ u)
    return 2.0 * math.atan2(-triple, denom)


def random_state(rng: np.random.Generator) -> PureState:
    """Haar-random pure state.

    Draws four standard normals (real and imaginary parts of the two
    amplitudes, in basis order) and normalizes, so the sequence of states
    for a fixed seed is reproducible.
    """
    re = rng.standard_normal(2)
    im = rng.standard_normal(2)
    return PureState(complex(re[0], im[0]), complex(re[1], im[1]))
