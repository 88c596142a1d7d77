"""Experiment configuration, validation, and execution.

Configs are JSON documents.  Top-level keys ``kind``, ``seed`` and
``output_path`` are common; everything else is the kind-specific parameter
block.  States can be written either as raw complex pairs

    {"amp_plus": [re, im], "amp_minus": [re, im]}

or as Bloch angles

    {"polar": theta, "azimuth": phi}

(cos(polar/2)|+> + e^{i azimuth} sin(polar/2)|->).  Complex scalars accept
a bare number or a [re, im] pair.

Randomized runs draw from ``numpy.random.default_rng(seed)`` (PCG64) in a
fixed documented order, so a config plus seed pins the CSV body byte for
byte.  Random state triples and eraser scenarios are redrawn whenever a
pairwise overlap magnitude falls below 1e-3: geometric phases lose relative
accuracy near orthogonality, and the redraw keeps randomized checks sharp
while remaining deterministic under the seed.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    DegenerateBracket,
    DegenerateTriangle,
    DomainError,
    ZeroVisibility,
)
from .eraser import (
    EraserScenario,
    PathState,
    constructive_phase_analytic,
    eraser_shift,
    labelling_shift,
    visibility,
)
from .operators import CouplingSpec, Observable, theta2
from .probe import GaussianProbe, WeakScenario, simulate_pointer
from .states import (
    PureState,
    inner_product,
    pancharatnam_phase,
    random_state,
    solid_angle,
    wrap_phase,
)
from .table import STATUS_OK, ResultTable

KINDS = ("eraser", "weak", "theta2_sweep", "eq14_check")

#: minimum pairwise overlap magnitude for randomly drawn state tuples.
RESAMPLE_TOL = 1e-3

_COMMON_KEYS = ("kind", "seed", "output_path")


@dataclass(frozen=True)
class ConfigViolation:
    """One schema violation: where (dotted field path) and what."""

    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


@dataclass
class ExperimentConfig:
    """Parsed experiment document; ``params`` holds the kind-specific block."""

    kind: str
    params: dict = field(default_factory=dict)
    output_path: str | None = None
    seed: int = 0

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config: document must be a JSON object")
        params = {k: v for k, v in doc.items() if k not in _COMMON_KEYS}
        return cls(
            kind=doc.get("kind", ""),
            params=params,
            output_path=doc.get("output_path"),
            seed=doc.get("seed", 0),
        )

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {path}: {exc}") from exc
        return cls.from_dict(doc)

    def as_dict(self) -> dict:
        doc = {"kind": self.kind, "seed": self.seed, **self.params}
        if self.output_path is not None:
            doc["output_path"] = self.output_path
        return doc


# ---------------------------------------------------------------------------
# parsing helpers (used by both validate and run)
# ---------------------------------------------------------------------------

def _as_complex(value):
    """number | [re] | [re, im] -> complex, or None when malformed."""
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and 1 <= len(value) <= 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        re = float(value[0])
        im = float(value[1]) if len(value) == 2 else 0.0
        return complex(re, im)
    return None


def _parse_state(value, where: str, violations: list[ConfigViolation]):
    if not isinstance(value, dict):
        violations.append(ConfigViolation(where, "state must be an object"))
        return None
    if "polar" in value or "azimuth" in value:
        extra = set(value) - {"polar", "azimuth"}
        if extra:
            violations.append(ConfigViolation(where, f"unexpected keys {sorted(extra)}"))
            return None
        polar = value.get("polar", 0.0)
        azimuth = value.get("azimuth", 0.0)
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                   and math.isfinite(v) for v in (polar, azimuth)):
            violations.append(ConfigViolation(where, "polar/azimuth must be finite numbers"))
            return None
        return PureState.from_bloch_angles(float(polar), float(azimuth))
    extra = set(value) - {"amp_plus", "amp_minus"}
    if extra or not {"amp_plus", "amp_minus"} <= set(value):
        violations.append(ConfigViolation(
            where, "state needs amp_plus/amp_minus or polar/azimuth"))
        return None
    a = _as_complex(value["amp_plus"])
    b = _as_complex(value["amp_minus"])
    if a is None or b is None:
        violations.append(ConfigViolation(where, "amplitudes must be numbers or [re, im]"))
        return None
    if abs(a) ** 2 + abs(b) ** 2 < 1e-24:
        violations.append(ConfigViolation(where, "state vector is zero (not normalizable)"))
        return None
    return PureState(a, b)


def _parse_observable(value, where: str, violations: list[ConfigViolation]):
    if value is None:
        return Observable.sigma_x()
    if (not isinstance(value, list) or len(value) != 2
            or any(not isinstance(r, list) or len(r) != 2 for r in value)):
        violations.append(ConfigViolation(where, "observable must be a 2x2 matrix"))
        return None
    entries = [[_as_complex(v) for v in row] for row in value]
    if any(e is None for row in entries for e in row):
        violations.append(ConfigViolation(where, "matrix entries must be numbers or [re, im]"))
        return None
    try:
        return Observable(np.array(entries, dtype=complex))
    except ValueError as exc:
        violations.append(ConfigViolation(where, str(exc)))
        return None


def _check_number(value, where, violations, *, positive=False, integer=False,
                  minimum=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        violations.append(ConfigViolation(where, "must be a number"))
        return None
    if integer and not float(value).is_integer():
        violations.append(ConfigViolation(where, "must be an integer"))
        return None
    if not math.isfinite(value):
        violations.append(ConfigViolation(where, "must be finite"))
        return None
    if positive and not value > 0:
        violations.append(ConfigViolation(where, f"must be positive, got {value}"))
        return None
    if minimum is not None and value < minimum:
        violations.append(ConfigViolation(where, f"must be >= {minimum}, got {value}"))
        return None
    return int(value) if integer else float(value)


def _check_grid_size(value, where, violations):
    n = _check_number(value, where, violations, integer=True)
    if n is None:
        return None
    if n < 256 or n & (n - 1):
        violations.append(ConfigViolation(
            where, f"grid size must be a power of two >= 256, got {n}"))
        return None
    return n


def _check_keys(params: dict, allowed: set[str], violations):
    for key in sorted(set(params) - allowed):
        violations.append(ConfigViolation(key, "unknown parameter"))


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def validate(config: ExperimentConfig) -> list[ConfigViolation]:
    """Schema-check a config; empty list means :func:`run` will not raise
    :class:`ConfigError`."""
    violations: list[ConfigViolation] = []
    if config.kind not in KINDS:
        violations.append(ConfigViolation(
            "kind", f"must be one of {list(KINDS)}, got {config.kind!r}"))
        return violations
    seed = config.seed
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        violations.append(ConfigViolation("seed", "must be an integer in [0, 2^64)"))
    if config.output_path is not None and not isinstance(config.output_path, str):
        violations.append(ConfigViolation("output_path", "must be a string path"))
    getattr_validator = {
        "eraser": _validate_eraser,
        "weak": _validate_weak,
        "theta2_sweep": _validate_theta2_sweep,
        "eq14_check": _validate_eq14_check,
    }[config.kind]
    getattr_validator(config.params, violations)
    return violations


def _validate_eraser(params: dict, violations):
    _check_keys(params, {"scenarios", "n_random"}, violations)
    scenarios = params.get("scenarios", [])
    if not isinstance(scenarios, list):
        violations.append(ConfigViolation("scenarios", "must be a list"))
        scenarios = []
    for idx, sc in enumerate(scenarios):
        where = f"scenarios[{idx}]"
        if not isinstance(sc, dict):
            violations.append(ConfigViolation(where, "scenario must be an object"))
            continue
        _check_keys({k: v for k, v in sc.items()},
                    {"c1", "c2", "psi_i", "psi_m1", "psi_m2", "psi_f"}, violations)
        c1 = _as_complex(sc.get("c1"))
        c2 = _as_complex(sc.get("c2"))
        if c1 is None or c2 is None:
            violations.append(ConfigViolation(
                f"{where}.c1/c2", "path amplitudes must be numbers or [re, im]"))
        elif abs(c1) ** 2 + abs(c2) ** 2 < 1e-24:
            violations.append(ConfigViolation(
                f"{where}.c1/c2", "path state is zero (not normalizable)"))
        for key in ("psi_m1", "psi_m2", "psi_f"):
            if key not in sc:
                violations.append(ConfigViolation(f"{where}.{key}", "required state missing"))
            else:
                _parse_state(sc[key], f"{where}.{key}", violations)
        if "psi_i" in sc:
            _parse_state(sc["psi_i"], f"{where}.psi_i", violations)
    n_random = params.get("n_random", 0)
    n_random = _check_number(n_random, "n_random", violations, integer=True, minimum=0)
    if n_random is not None and not scenarios and n_random == 0:
        violations.append(ConfigViolation(
            "scenarios", "need at least one scenario or n_random >= 1"))


def _validate_weak(params: dict, violations):
    _check_keys(params, {"theta", "psi_i", "psi_f", "observable", "hbar",
                         "g_values", "delta_p_values", "n_points", "span"}, violations)
    has_theta = "theta" in params
    has_states = "psi_i" in params or "psi_f" in params
    psi_i = psi_f = None
    if has_theta and has_states:
        violations.append(ConfigViolation(
            "theta", "give either theta or psi_i/psi_f, not both"))
    elif has_theta:
        theta = _check_number(params["theta"], "theta", violations)
        if theta is not None:
            psi_i = PureState.plus()
            if abs(math.sin(theta)) < 1e-12:
                violations.append(ConfigViolation(
                    "theta", "sin(theta) ~ 0 makes psi_f orthogonal to psi_i"))
            else:
                psi_f = PureState(math.sin(theta), math.cos(theta))
    else:
        for key in ("psi_i", "psi_f"):
            if key not in params:
                violations.append(ConfigViolation(key, "required state missing"))
        if "psi_i" in params:
            psi_i = _parse_state(params["psi_i"], "psi_i", violations)
        if "psi_f" in params:
            psi_f = _parse_state(params["psi_f"], "psi_f", violations)
    if psi_i is not None and psi_f is not None:
        if abs(inner_product(psi_f, psi_i)) < 1e-12:
            violations.append(ConfigViolation(
                "psi_f", "orthogonal to psi_i within 1e-12: the weak value "
                "diverges and no post-selected readout exists"))
    _parse_observable(params.get("observable"), "observable", violations)
    _check_number(params.get("hbar", 1.0), "hbar", violations, positive=True)
    for key in ("g_values", "delta_p_values"):
        values = params.get(key)
        if not isinstance(values, list) or not values:
            violations.append(ConfigViolation(key, "must be a non-empty list"))
            continue
        for idx, v in enumerate(values):
            _check_number(v, f"{key}[{idx}]", violations,
                          positive=(key == "delta_p_values"))
    _check_grid_size(params.get("n_points", 4096), "n_points", violations)
    _check_number(params.get("span", 8.0), "span", violations, minimum=6.0)


def _validate_theta2_sweep(params: dict, violations):
    _check_keys(params, {"thetas", "G", "hbar", "p_min", "p_max", "n_samples",
                         "p_values"}, violations)
    thetas = params.get("thetas")
    if not isinstance(thetas, list) or not thetas:
        violations.append(ConfigViolation("thetas", "must be a non-empty list"))
    else:
        for idx, theta in enumerate(thetas):
            t = _check_number(theta, f"thetas[{idx}]", violations)
            if t is not None and not 0.0 < t < math.pi / 2.0:
                violations.append(ConfigViolation(
                    f"thetas[{idx}]", f"must lie in (0, pi/2), got {t}"))
    _check_number(params.get("G", 1.0), "G", violations)
    _check_number(params.get("hbar", 1.0), "hbar", violations, positive=True)
    if "p_values" in params:
        pv = params["p_values"]
        if not isinstance(pv, list) or not pv:
            violations.append(ConfigViolation("p_values", "must be a non-empty list"))
        else:
            for idx, v in enumerate(pv):
                _check_number(v, f"p_values[{idx}]", violations)
        for key in ("p_min", "p_max", "n_samples"):
            if key in params:
                violations.append(ConfigViolation(
                    key, "not allowed together with p_values"))
    else:
        p_min = _check_number(params.get("p_min"), "p_min", violations)
        p_max = _check_number(params.get("p_max"), "p_max", violations)
        if p_min is not None and p_max is not None and not p_min < p_max:
            violations.append(ConfigViolation("p_min", "must be < p_max"))
        _check_number(params.get("n_samples", 1001), "n_samples", violations,
                      integer=True, minimum=2)


def _validate_eq14_check(params: dict, violations):
    _check_keys(params, {"n_triples"}, violations)
    _check_number(params.get("n_triples", 1000), "n_triples", violations,
                  integer=True, minimum=1)


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

def run(config: ExperimentConfig) -> ResultTable:
    """Execute a validated config and return its result table.

    Raises :class:`ConfigError` when validation fails and lets scenario-level
    :class:`DomainError` propagate with the offending parameters attached.
    Rows whose sample merely degenerates (flat fringe, vanishing bracket)
    are emitted with a non-"ok" status and zeroed cells instead.
    """
    violations = validate(config)
    if violations:
        raise ConfigError("; ".join(str(v) for v in violations))
    rng = np.random.default_rng(config.seed)
    table = {
        "eraser": _run_eraser,
        "weak": _run_weak,
        "theta2_sweep": _run_theta2_sweep,
        "eq14_check": _run_eq14_check,
    }[config.kind](config.params, rng)
    table.metadata = {
        "artifact_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config": json.dumps(config.as_dict(), sort_keys=True,
                             separators=(",", ":")),
    }
    return table


def _nondegenerate_triple(rng) -> tuple[PureState, PureState, PureState]:
    """Haar triple redrawn until all pairwise overlaps exceed RESAMPLE_TOL."""
    while True:
        a, b, c = random_state(rng), random_state(rng), random_state(rng)
        if min(abs(inner_product(a, b)), abs(inner_product(b, c)),
               abs(inner_product(c, a))) >= RESAMPLE_TOL:
            return a, b, c


def random_eraser_scenario(rng: np.random.Generator) -> EraserScenario:
    """Random eraser scenario: path amplitudes from two complex normals,
    then psi_i and a label/post-selection triple (psi_m1, psi_f, psi_m2)
    redrawn until pairwise non-degenerate."""
    re = rng.standard_normal(2)
    im = rng.standard_normal(2)
    path = PathState(complex(re[0], im[0]), complex(re[1], im[1]))
    psi_i = random_state(rng)
    psi_m1, psi_f, psi_m2 = _nondegenerate_triple(rng)
    return EraserScenario(path=path, psi_i=psi_i, psi_m1=psi_m1,
                          psi_m2=psi_m2, psi_f=psi_f)


def _run_eraser(params: dict, rng) -> ResultTable:
    table = ResultTable(columns=[
        "index", "delta_i", "delta_m", "delta_f", "shift_labelling",
        "shift_eraser", "vis_initial", "vis_labelled", "vis_postselected",
    ])
    scenarios: list[EraserScenario] = []
    sink: list[ConfigViolation] = []
    for sc in params.get("scenarios", []):
        scenarios.append(EraserScenario(
            path=PathState(_as_complex(sc["c1"]), _as_complex(sc["c2"])),
            psi_i=_parse_state(sc["psi_i"], "psi_i", sink) if "psi_i" in sc
            else PureState.plus(),
            psi_m1=_parse_state(sc["psi_m1"], "psi_m1", sink),
            psi_m2=_parse_state(sc["psi_m2"], "psi_m2", sink),
            psi_f=_parse_state(sc["psi_f"], "psi_f", sink),
        ))
    for _ in range(int(params.get("n_random", 0))):
        scenarios.append(random_eraser_scenario(rng))
    for idx, s in enumerate(scenarios):
        try:
            row = [
                float(idx),
                constructive_phase_analytic(s, "initial"),
                constructive_phase_analytic(s, "labelled"),
                constructive_phase_analytic(s, "post_selected"),
                labelling_shift(s),
                eraser_shift(s),
                visibility(s, "initial"),
                visibility(s, "labelled"),
                visibility(s, "post_selected"),
            ]
            table.append(row)
        except (ZeroVisibility, DegenerateTriangle) as exc:
            table.append([float(idx)] + [0.0] * 8, status=_status_of(exc))
    return table


def _run_weak(params: dict, rng) -> ResultTable:
    del rng  # the sweep is fully specified by the config
    sink: list[ConfigViolation] = []
    if "theta" in params:
        psi_i = PureState.plus()
        psi_f = PureState(math.sin(float(params["theta"])),
                          math.cos(float(params["theta"])))
    else:
        psi_i = _parse_state(params["psi_i"], "psi_i", sink)
        psi_f = _parse_state(params["psi_f"], "psi_f", sink)
    A = _parse_observable(params.get("observable"), "observable", sink)
    hbar = float(params.get("hbar", 1.0))
    n_points = int(params.get("n_points", 4096))
    span = float(params.get("span", 8.0))
    table = ResultTable(columns=[
        "G", "delta_p", "dx_simulated", "dx_analytic", "dx1", "dx2",
        "success_probability", "weakness_ratio",
    ])
    for g, dp in itertools.product(params["g_values"], params["delta_p_values"]):
        try:
            scenario = WeakScenario(
                psi_i=psi_i, psi_f=psi_f, A=A,
                coupling=CouplingSpec(float(g), hbar),
                probe=GaussianProbe.gaussian(float(dp), n_points, span),
            )
            result = simulate_pointer(scenario)
        except DomainError as exc:
            raise type(exc)(f"{exc} [G={g}, delta_p={dp}]") from exc
        table.append([
            float(g), float(dp), result.dx_simulated, result.dx_analytic,
            result.dx1, result.dx2, result.success_probability,
            result.weakness_ratio,
        ])
    return table


def _run_theta2_sweep(params: dict, rng) -> ResultTable:
    del rng
    thetas = [float(t) for t in params["thetas"]]
    coupling = CouplingSpec(float(params.get("G", 1.0)),
                            float(params.get("hbar", 1.0)))
    if "p_values" in params:
        p_samples = [float(p) for p in params["p_values"]]
    else:
        p_samples = np.linspace(float(params["p_min"]), float(params["p_max"]),
                                int(params.get("n_samples", 1001))).tolist()
    psi_i = PureState.plus()
    finals = [PureState(math.sin(t), math.cos(t)) for t in thetas]
    A = Observable.sigma_x()
    table = ResultTable(columns=["p"] + [f"theta2(theta={t:.17g})" for t in thetas])
    for p in p_samples:
        row = [p]
        status = STATUS_OK
        for psi_f in finals:
            try:
                row.append(theta2(A, coupling, psi_i, psi_f, p))
            except DegenerateBracket:
                row.append(0.0)
                status = "degenerate_bracket"
        table.append(row, status=status)
    return table


def _run_eq14_check(params: dict, rng) -> ResultTable:
    table = ResultTable(columns=["index", "pancharatnam", "solid_angle",
                                 "deviation"])
    for idx in range(int(params.get("n_triples", 1000))):
        a, b, c = _nondegenerate_triple(rng)
        phase = pancharatnam_phase(a, b, c)
        omega = solid_angle(a, b, c)
        table.append([float(idx), phase, omega,
                      abs(wrap_phase(phase + omega / 2.0))])
    return table


def _status_of(exc: DomainError) -> str:
    return {
        "ZeroVisibility": "zero_visibility",
        "DegenerateTriangle": "degenerate_triangle",
        "DegenerateBracket": "degenerate_bracket",
    }.get(type(exc).__name__, "domain_error")


def summarize(config: ExperimentConfig, table: ResultTable) -> str:
    """One-paragraph human summary of a finished run."""
    flagged = sum(1 for st in table.status if st != STATUS_OK)
    if config.kind == "eq14_check":
        worst = max(table.column("deviation"), default=0.0)
        return (f"eq14-check: {len(table)} random triples, "
                f"max |pancharatnam + solid_angle/2| = {worst:.3e}")
    if config.kind == "weak":
        sim = table.column("dx_simulated")
        ana = table.column("dx_analytic")
        worst = max((abs(s - a) for s, a in zip(sim, ana)), default=0.0)
        return (f"weak: {len(table)} (G, delta_p) points, "
                f"max |dx_simulated - dx_analytic| = {worst:.3e}")
    if config.kind == "theta2_sweep":
        n_thetas = len(table.columns) - 1
        return (f"theta2-sweep: {len(table)} momentum samples x {n_thetas} "
                f"post-selection angles, {flagged} degenerate rows")
    return f"eraser: {len(table)} scenarios, {flagged} flagged rows"
