"""Run configuration: INI-style config files with typed validation.

Sections and keys are fixed; unknown keys are errors rather than silently
ignored, and every value is checked against the preconditions of the module
it feeds.  `--set section.key=value` overrides are applied to the raw text
values before typing, so they follow the same validation path.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass

from .errors import ConfigError
from .sampling import (
    EpsilonSpec,
    IrrationalEpsilon,
    RationalEpsilon,
    split_interval,
)
from .source_models import (
    CorrelationKernel,
    CtSourceModel,
    Harmonic,
    VarianceProfile,
    validate_model,
)

TASKS = ("rdf-curve", "phase-sweep", "block-sweep", "validate", "codec-baseline")

_SCHEMA = {
    "model": {"period_Tc", "offset", "harmonics", "kernel", "max_lag"},
    "sampling": {
        "p",
        "epsilon_kind",
        "epsilon_u",
        "epsilon_v",
        "epsilon_value",
        "epsilon_label",
        "target_Ts",
        "phase",
        "phase_grid",
        "block_grid",
    },
    "task": {"name"},
    "distortion": {"grid"},
    "mc": {"n_draws", "seed"},
    "output": {"prefix"},
}


@dataclass(frozen=True)
class RunConfig:
    """Fully validated run configuration."""

    model: CtSourceModel
    p: int
    epsilon: EpsilonSpec
    phase: float
    phase_grid: int
    block_grid: tuple[int, ...]
    task: str
    distortions: tuple[float, ...]
    n_draws: int
    seed: int
    output_prefix: str

    def echo_items(self):
        """(key, value) pairs for the manifest's config echo."""
        prof = self.model.profile
        harm = " ".join(f"{h.order}:{h.amplitude:.12g}:{h.phase:.12g}" for h in prof.harmonics)
        eps = self.epsilon
        if isinstance(eps, RationalEpsilon):
            eps_items = [("sampling.epsilon", f"rational {eps.u}/{eps.v}")]
        else:
            eps_items = [("sampling.epsilon", f"irrational {eps.value:.12g} ({eps.label})")]
        return [
            ("model.period_Tc", f"{prof.period_Tc:.12g}"),
            ("model.offset", f"{prof.offset:.12g}"),
            ("model.harmonics", harm),
            ("model.kernel", self.model.kernel.variant),
            ("model.max_lag", f"{self.model.kernel.max_lag:.12g}"),
            ("sampling.p", str(self.p)),
            *eps_items,
            ("sampling.phase", f"{self.phase:.12g}"),
            ("sampling.phase_grid", str(self.phase_grid)),
            ("sampling.block_grid", " ".join(str(b) for b in self.block_grid)),
            ("task.name", self.task),
            ("distortion.grid", " ".join(f"{d:.12g}" for d in self.distortions)),
            ("mc.n_draws", str(self.n_draws)),
            ("mc.seed", str(self.seed)),
            ("output.prefix", self.output_prefix),
        ]


def _fail(key: str, message: str):
    raise ConfigError(f"{key}: {message}")


def _get(raw: dict, section: str, key: str, default=None, required=False) -> str | None:
    value = raw.get(section, {}).get(key)
    if value is None or value == "":
        if required:
            _fail(f"{section}.{key}", "required key is missing")
        return default
    return value


def _typed(section: str, key: str, text: str, kind):
    try:
        if kind is int:
            return int(text)
        if kind is float:
            value = float(text)
            if not math.isfinite(value):
                raise ValueError("not finite")
            return value
    except ValueError:
        _fail(f"{section}.{key}", f"expected {kind.__name__}, got {text!r}")
    return text


def _number_list(section: str, key: str, text: str, kind) -> tuple:
    items = text.replace(",", " ").split()
    if not items:
        _fail(f"{section}.{key}", "list must not be empty")
    return tuple(_typed(section, key, item, kind) for item in items)


def _parse_harmonics(text: str) -> tuple[Harmonic, ...]:
    out = []
    for triplet in text.split():
        parts = triplet.split(":")
        if len(parts) != 3:
            _fail("model.harmonics", f"expected k:amplitude:phase, got {triplet!r}")
        k = _typed("model", "harmonics", parts[0], int)
        amp = _typed("model", "harmonics", parts[1], float)
        ph = _typed("model", "harmonics", parts[2], float)
        out.append(Harmonic(order=k, amplitude=amp, phase=ph))
    return tuple(out)


def _parse_epsilon(raw: dict) -> tuple[int | None, EpsilonSpec]:
    kind = _get(raw, "sampling", "epsilon_kind", required=True)
    if kind not in ("rational", "irrational"):
        _fail("sampling.epsilon_kind", f"must be 'rational' or 'irrational', got {kind!r}")
    target_ts = _get(raw, "sampling", "target_Ts")
    p_text = _get(raw, "sampling", "p")

    if kind == "rational":
        if target_ts is not None:
            _fail(
                "sampling.target_Ts",
                "a derived interval cannot carry a rational tag; give p and u/v directly",
            )
        u = _typed("sampling", "epsilon_u", _get(raw, "sampling", "epsilon_u", required=True), int)
        v = _typed("sampling", "epsilon_v", _get(raw, "sampling", "epsilon_v", required=True), int)
        if p_text is None:
            _fail("sampling.p", "required key is missing")
        try:
            eps = RationalEpsilon(u=u, v=v)
        except ValueError as err:
            _fail("sampling.epsilon", str(err))
        return _typed("sampling", "p", p_text, int), eps

    label = _get(raw, "sampling", "epsilon_label", default="")
    if target_ts is not None:
        if p_text is not None or _get(raw, "sampling", "epsilon_value") is not None:
            _fail("sampling.target_Ts", "give either target_Ts or explicit p/epsilon_value")
        return None, IrrationalEpsilon(value=0.0, label=label)  # placeholder, derived later
    value = _typed(
        "sampling", "epsilon_value", _get(raw, "sampling", "epsilon_value", required=True), float
    )
    if p_text is None:
        _fail("sampling.p", "required key is missing")
    try:
        eps = IrrationalEpsilon(value=value, label=label)
    except ValueError as err:
        _fail("sampling.epsilon", str(err))
    return _typed("sampling", "p", p_text, int), eps


def read_raw(path: str) -> dict:
    """Read an INI file into a dict of raw string values, checking the schema."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keys are case-sensitive
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from err
    except configparser.Error as err:
        raise ConfigError(f"cannot parse config file {path}: {err}") from err
    raw: dict = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            _fail(section, "unknown section")
        for key, value in parser.items(section):
            if key not in _SCHEMA[section]:
                _fail(f"{section}.{key}", "unknown key")
            raw.setdefault(section, {})[key] = value
    return raw


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Apply `section.key=value` overrides to raw string values."""
    out = {s: dict(kv) for s, kv in raw.items()}
    for item in overrides:
        if "=" not in item:
            _fail(item, "override must look like section.key=value")
        dotted, value = item.split("=", 1)
        if "." not in dotted:
            _fail(dotted, "override key must look like section.key")
        section, key = dotted.split(".", 1)
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            _fail(f"{section}.{key}", "unknown key")
        out.setdefault(section, {})[key] = value
    return out


def build_config(raw: dict) -> RunConfig:
    """Validate raw string values into a RunConfig, checking module preconditions."""
    period = _typed("model", "period_Tc", _get(raw, "model", "period_Tc", required=True), float)
    offset = _typed("model", "offset", _get(raw, "model", "offset", required=True), float)
    harmonics = _parse_harmonics(_get(raw, "model", "harmonics", default=""))
    kernel_name = _get(raw, "model", "kernel", required=True)
    max_lag = _typed("model", "max_lag", _get(raw, "model", "max_lag", required=True), float)
    model = CtSourceModel(
        profile=VarianceProfile(period_Tc=period, offset=offset, harmonics=harmonics),
        kernel=CorrelationKernel(variant=kernel_name, max_lag=max_lag),
    )
    try:
        validate_model(model)
    except Exception as err:
        _fail("model", str(err))

    p, epsilon = _parse_epsilon(raw)
    if p is None:  # derived from target_Ts
        ts = _typed("sampling", "target_Ts", _get(raw, "sampling", "target_Ts"), float)
        try:
            p, value = split_interval(period, ts)
        except ValueError as err:
            _fail("sampling.target_Ts", str(err))
        epsilon = IrrationalEpsilon(value=value, label=epsilon.label or "derived from target_Ts")
    if p < 1:
        _fail("sampling.p", f"must be a positive integer, got {p}")

    phase = _typed("sampling", "phase", _get(raw, "sampling", "phase", default="0"), float)
    if phase < 0:
        _fail("sampling.phase", f"must be >= 0, got {phase}")
    phase_grid = _typed(
        "sampling", "phase_grid", _get(raw, "sampling", "phase_grid", default="16"), int
    )
    if phase_grid < 2:
        _fail("sampling.phase_grid", f"must be >= 2, got {phase_grid}")
    block_grid = _number_list(
        "sampling", "block_grid", _get(raw, "sampling", "block_grid", required=True), int
    )
    if any(b < 1 for b in block_grid):
        _fail("sampling.block_grid", "blocklengths must be >= 1")
    if any(a >= b for a, b in zip(block_grid, block_grid[1:])):
        _fail("sampling.block_grid", "must be strictly increasing")

    task = _get(raw, "task", "name", required=True)
    if task not in TASKS:
        _fail("task.name", f"must be one of {', '.join(TASKS)}; got {task!r}")

    distortions = _number_list(
        "distortion", "grid", _get(raw, "distortion", "grid", required=True), float
    )
    if any(d <= 0 for d in distortions):
        _fail("distortion.grid", "distortions must be > 0")

    n_draws = _typed("mc", "n_draws", _get(raw, "mc", "n_draws", default="10000"), int)
    if n_draws < 1:
        _fail("mc.n_draws", f"must be >= 1, got {n_draws}")
    seed = _typed("mc", "seed", _get(raw, "mc", "seed", default="0"), int)
    if not (0 <= seed < 2**64):
        _fail("mc.seed", "must fit in 64 unsigned bits")

    prefix = _get(raw, "output", "prefix", default="cyclordf-out")

    return RunConfig(
        model=model,
        p=p,
        epsilon=epsilon,
        phase=phase,
        phase_grid=phase_grid,
        block_grid=block_grid,
        task=task,
        distortions=distortions,
        n_draws=n_draws,
        seed=seed,
        output_prefix=prefix,
    )


def parse_config(path: str, overrides: list[str] | None = None) -> RunConfig:
    """Read, override, and validate a config file."""
    raw = read_raw(path)
    if overrides:
        raw = apply_overrides(raw, overrides)
    return build_config(raw)
