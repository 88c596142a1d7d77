"""Exception hierarchy shared by all simulation modules.

``DomainError`` covers every physics-level failure (degenerate brackets,
orthogonal selections, vanished post-selections, ...).  ``ConfigError`` is
reserved for malformed experiment configurations and is raised only by the
runner.  The CLI maps the two branches onto distinct exit codes.
"""


class DomainError(Exception):
    """A requested quantity is undefined or unreliable for these inputs."""


class DegenerateTriangle(DomainError):
    """Two of the three states are (numerically) orthogonal, so the
    Pancharatnam phase / solid angle of their triangle is undefined."""


class DegenerateBracket(DomainError):
    """An inner-product bracket fell below the magnitude tolerance."""


class OrthogonalSelection(DomainError):
    """Pre- and post-selected states are orthogonal; the weak value diverges."""


class MissingPostSelection(DomainError):
    """A post-selected quantity was requested from a scenario without psi_f."""


class ZeroVisibility(DomainError):
    """The fringe cross term vanishes; the constructive phase is meaningless."""


class PostSelectionVanished(DomainError):
    """Post-selection succeeds with probability below tolerance."""


class GridTooCoarse(DomainError):
    """The post-selected wavepacket phase advances too fast per grid step
    for finite differences to be trusted (aliasing guard)."""


class ConfigError(Exception):
    """An experiment configuration violates its schema.

    The message carries the offending field path.
    """
