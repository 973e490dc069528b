"""Sectioned key-value experiment configuration.

The on-disk grammar is INI-style: ``[section]`` headers, one ``key =
value`` pair per line, ``#``/``;`` comments, UTF-8.  Recognized
sections are ``conservative``, ``dissipative``, ``superstat``,
``inference`` and ``io``; every key mirrors a field of the owning
module's config and unknown sections or keys are hard errors, so a
typo cannot silently fall back to a default.  ``emit_config`` writes
the fully resolved document (defaults materialized, canonical key
order), and ``parse_config(emit_config(cfg)) == cfg`` holds for every
valid configuration.
"""
from __future__ import annotations

import configparser
import io as _io
from dataclasses import dataclass, fields, replace

from .conservative import ConservativeConfig
from .dissipative import DissipativeConfig
from .errors import ConfigError
from .inference import LIKELIHOOD_KINDS
from .superstat import CONSTANT, GENERALIZED, KINDS, MixingModel


@dataclass(frozen=True)
class SuperstatConfig:
    """Mixing-model parameters plus generation controls."""

    kind: str = "inverse-gamma"
    alpha: float = 4.0
    beta: float = 4.0
    gamma: float = 1.0
    sigma0: float = 1.0
    n: int = 10000
    tau: int = 1
    seed: int = 0
    slow_mixing: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.tau < 1:
            raise ValueError("tau must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        self.model()  # validate the distribution parameters eagerly

    def model(self) -> MixingModel:
        if self.kind == CONSTANT:
            return MixingModel(kind=self.kind, sigma0=self.sigma0)
        if self.kind == GENERALIZED:
            return MixingModel(kind=self.kind, alpha=self.alpha, beta=self.beta, gamma=self.gamma)
        return MixingModel(kind=self.kind, alpha=self.alpha, beta=self.beta)

    def with_seed(self, seed: int) -> "SuperstatConfig":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class InferenceConfig:
    """Prior, known mean, and model-comparison settings.

    ``models`` lists likelihood kinds; ``model_priors``,
    ``model_alphas`` and ``model_betas`` run parallel to it.
    """

    mu: float = 0.0
    prior_alpha: float = 3.0
    prior_beta: float = 2.0
    models: tuple[str, ...] = ("gaussian-known-mean", "exponential")
    model_priors: tuple[float, ...] = (0.5, 0.5)
    model_alphas: tuple[float, ...] = (3.0, 3.0)
    model_betas: tuple[float, ...] = (2.0, 2.0)
    max_doublings: int = 24
    rel_tol: float = 1e-8

    def __post_init__(self):
        if self.prior_alpha <= 0 or self.prior_beta <= 0:
            raise ValueError("prior_alpha and prior_beta must be positive")
        if len(self.models) == 0:
            raise ValueError("at least one model is required")
        for kind in self.models:
            if kind not in LIKELIHOOD_KINDS:
                raise ValueError(f"unknown likelihood kind {kind!r}")
        k = len(self.models)
        for name, seq in (
            ("model_priors", self.model_priors),
            ("model_alphas", self.model_alphas),
            ("model_betas", self.model_betas),
        ):
            if len(seq) != k:
                raise ValueError(f"{name} must have one entry per model ({k})")
        if any(p < 0 for p in self.model_priors):
            raise ValueError("model_priors must be nonnegative")
        if abs(sum(self.model_priors) - 1.0) > 1e-9:
            raise ValueError("model_priors must sum to 1")
        if any(a <= 0 for a in self.model_alphas) or any(b <= 0 for b in self.model_betas):
            raise ValueError("model hyperparameters must be positive")
        if self.max_doublings < 1:
            raise ValueError("max_doublings must be >= 1")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")


@dataclass(frozen=True)
class IoConfig:
    """File-facing knobs: input path and emission controls.

    ``histogram_every = 0`` emits only the final-step histogram;
    a positive value emits every that-many steps plus the final step.
    """

    input: str = ""
    write_microstates: bool = True
    histogram_bins: int = 50
    histogram_every: int = 0

    def __post_init__(self):
        if self.histogram_bins < 1:
            raise ValueError("histogram_bins must be >= 1")
        if self.histogram_every < 0:
            raise ValueError("histogram_every must be >= 0")


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration document; absent sections stay None."""

    conservative: ConservativeConfig | None = None
    dissipative: DissipativeConfig | None = None
    superstat: SuperstatConfig | None = None
    inference: InferenceConfig | None = None
    io: IoConfig | None = None


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t == "true":
        return True
    if t == "false":
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part.strip()) for part in text.split(","))


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part.strip()) for part in text.split(","))


def _parse_str_list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(","))


def _identity(text: str) -> str:
    return text.strip()


# key -> parser; emit is the inverse, handled by _format_value
_SCHEMA: dict[str, dict[str, object]] = {
    "conservative": {
        "steps": int,
        "n_microstates": int,
        "bets_per_step": int,
        "seed": int,
        "smoothing_window": int,
        "eps_class": float,
    },
    "dissipative": {
        "steps": int,
        "grain_sizes": _parse_int_list,
        "seed": int,
        "bets_fraction": float,
        "bets_per_grain": int,
        "injection_prob": float,
        "injection_size_range": _parse_int_list,
        "removal_prob": float,
        "removal_policy": _identity,
        "eps_eq": float,
        "sustain": int,
    },
    "superstat": {
        "kind": _identity,
        "alpha": float,
        "beta": float,
        "gamma": float,
        "sigma0": float,
        "n": int,
        "tau": int,
        "seed": int,
        "slow_mixing": _parse_bool,
    },
    "inference": {
        "mu": float,
        "prior_alpha": float,
        "prior_beta": float,
        "models": _parse_str_list,
        "model_priors": _parse_float_list,
        "model_alphas": _parse_float_list,
        "model_betas": _parse_float_list,
        "max_doublings": int,
        "rel_tol": float,
    },
    "io": {
        "input": _identity,
        "write_microstates": _parse_bool,
        "histogram_bins": int,
        "histogram_every": int,
    },
}

_SECTION_TYPES = {
    "conservative": ConservativeConfig,
    "dissipative": DissipativeConfig,
    "superstat": SuperstatConfig,
    "inference": InferenceConfig,
    "io": IoConfig,
}

_REQUIRED_KEYS = {
    "conservative": ("steps",),
    "dissipative": ("steps",),
    "superstat": (),
    "inference": (),
    "io": (),
}


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document.

    Raises :class:`ConfigError` on syntax errors, unknown sections or
    keys, missing required keys, unparseable values, or values that
    violate a section's invariants.
    """
    cp = configparser.ConfigParser(
        interpolation=None,
        strict=True,
        comment_prefixes=("#", ";"),
        inline_comment_prefixes=None,
        default_section="",
    )
    cp.optionxform = str  # keys are case-sensitive
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc
    sections: dict[str, object] = {}
    for name in cp.sections():
        if name not in _SCHEMA:
            raise ConfigError(
                f"unknown section [{name}]; expected one of {sorted(_SCHEMA)}"
            )
        schema = _SCHEMA[name]
        values: dict[str, object] = {}
        for key, raw in cp.items(name):
            if key not in schema:
                raise ConfigError(f"unknown key {key!r} in section [{name}]")
            try:
                values[key] = schema[key](raw)  # type: ignore[operator]
            except ValueError as exc:
                raise ConfigError(f"bad value for [{name}] {key} = {raw!r}: {exc}") from exc
        for key in _REQUIRED_KEYS[name]:
            if key not in values:
                raise ConfigError(f"section [{name}] requires key {key!r}")
        try:
            sections[name] = _SECTION_TYPES[name](**values)
        except ValueError as exc:
            raise ConfigError(f"invalid [{name}] configuration: {exc}") from exc
    return RunConfig(**sections)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, str)):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(_format_value(v) for v in value)
    raise TypeError(f"cannot format config value {value!r}")


def emit_config(config: RunConfig) -> str:
    """Render the document in canonical form (all keys, schema order).

    The output parses back to an equal RunConfig: floats are written
    with repr so round-tripping is exact.
    """
    out = _io.StringIO()
    for name in _SCHEMA:
        section = getattr(config, name)
        if section is None:
            continue
        out.write(f"[{name}]\n")
        field_names = {f.name for f in fields(section)}
        for key in _SCHEMA[name]:
            if key not in field_names:
                continue
            value = getattr(section, key)
            if value is None:
                continue  # unset optional; absence round-trips to None
            out.write(f"{key} = {_format_value(value)}\n")
        out.write("\n")
    return out.getvalue()
