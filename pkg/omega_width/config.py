"""
Run configuration for the command-line tool.

Handles loading, validation, and merging of configuration from multiple sources:
- Default values
- JSON config files
- Command-line overrides
"""

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any

from .logging_config import get_logger

logger = get_logger(__name__)

COMMANDS = (
    "export-atlas",
    "minimize",
    "check-minimal",
    "solve-finite",
    "reduce",
    "solve",
    "verify-witness",
    "analyze-structure",
    "analyze-mmsnp",
    "fpp-solve",
    "loop-harness",
    "gen",
    "repro",
)
MODES = ("wnu", "ts", "family")
ANALYSES = ("bounded-width", "ts", "core")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class ConfigError(Exception):
    """Raised when configuration is invalid or cannot be loaded."""

    pass


# ============================================================================
# Main Configuration Dataclass
# ============================================================================


@dataclass(slots=True, kw_only=True)
class RunConfig:
    """
    Configuration of one command-line run.

    Attributes:
        command: Subcommand to run.
        atlas: Atlas family spec (``henson:3``) or atlas file.
        instance: Instance file.
        structure: Structure file for ``analyze-structure`` and ``loop-harness``.
        obstructions: Obstruction-set text file.
        input_structure: Input structure file for ``fpp-solve``.
        witness: Witness file for ``verify-witness``.
        output: Report or artifact output path.
        emit_witness: Where ``solve`` writes its witness.
        certificate: Certificate file written by ``analyze-structure`` and read by
            ``loop-harness``.
        k: Explicit k' override; set together with ``ell``.
        ell: Explicit ell' override.
        mode: ``wnu``, ``ts`` or ``family``.
        analyses: Analyses run by ``analyze-structure``.
        route: ``lift`` or ``coloring`` for ``fpp-solve``.
        trials: Harness trials.
        seed: Seed of every random choice.
        n_vars: Variables of generated instances.
        n_constraints: Constraints of generated instances.
        closure_cap: State cap of closures and indicator searches.
        pattern_cap: Cap on materialized patterns per constraint.
        node_cap: Node cap of finite searches.
        unsafe: Allow levels beyond the capability bound.
        assert_normal_form: Treat the obstruction set as asserted in normal form.
        certify: Search a certificate on the orbit structure before solving.
        quick: Scale acceptance trial counts down.
        log_level: Logging level.
        log_file: Optional log file.
    """

    command: str = "solve"

    # Inputs and outputs
    atlas: str | None = None
    instance: str | None = None
    structure: str | None = None
    obstructions: str | None = None
    input_structure: str | None = None
    witness: str | None = None
    output: str | None = None
    emit_witness: str | None = None
    certificate: str | None = None

    # Levels and modes
    k: int | None = None
    ell: int | None = None
    mode: str = "wnu"
    analyses: tuple[str, ...] = ("bounded-width",)
    route: str = "lift"

    # Generation and harness
    trials: int = 100
    seed: int = 42
    n_vars: int = 6
    n_constraints: int = 8

    # Caps
    closure_cap: int = 10**7
    pattern_cap: int | None = None
    node_cap: int | None = None

    # Flags
    unsafe: bool = False
    assert_normal_form: bool = False
    certify: bool = False
    quick: bool = False

    # Logging
    log_level: str = "WARNING"
    log_file: str | None = None

    def __post_init__(self) -> None:
        """Validate configuration after initialization."""
        self.analyses = tuple(self.analyses)
        self._validate()

    def _validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r} (known: {', '.join(COMMANDS)})")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be wnu, ts, or family (got: {self.mode})")
        if self.route not in ("lift", "coloring"):
            raise ConfigError(f"route must be lift or coloring (got: {self.route})")
        unknown = sorted(set(self.analyses) - set(ANALYSES))
        if unknown:
            raise ConfigError(f"unknown analyses: {unknown}")
        if (self.k is None) != (self.ell is None):
            raise ConfigError("k and ell overrides must be given together")
        if self.k is not None and (self.k < 1 or self.ell < self.k):  # type: ignore[operator]
            raise ConfigError(f"levels need 1 <= k <= ell (got k={self.k}, ell={self.ell})")
        if self.trials < 0:
            raise ConfigError("trials must be non-negative")
        if self.n_vars < 1 or self.n_constraints < 0:
            raise ConfigError("n_vars must be positive and n_constraints non-negative")
        for cap_name in ("closure_cap", "pattern_cap", "node_cap"):
            cap = getattr(self, cap_name)
            if cap is not None and cap < 1:
                raise ConfigError(f"{cap_name} must be positive")
        if self.log_level not in LOG_LEVELS:
            raise ConfigError(f"log_level must be one of {', '.join(LOG_LEVELS)}")
        logger.debug("Config validated: command=%s, mode=%s", self.command, self.mode)

    @property
    def levels(self) -> tuple[int, int] | None:
        if self.k is None or self.ell is None:
            return None
        return (self.k, self.ell)

    def merge(self, overrides: dict[str, Any]) -> "RunConfig":
        """
        Create new config by merging with overrides.

        Args:
            overrides: Values to override; None values are ignored.

        Returns:
            New RunConfig instance with merged values.

        Raises:
            ConfigError: On unknown keys or invalid merged values.
        """
        known = {f.name for f in fields(self)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {unknown}")
        current = asdict(self)
        current.update({key: value for key, value in overrides.items() if value is not None})
        logger.debug("Config merged with %d overrides", len(overrides))
        return RunConfig(**current)

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["analyses"] = list(self.analyses)
        return data

    def to_json(self, indent: int = 2) -> str:
        """Config file text, tagged with the artifact envelope."""
        document = {"format": "config", "version": 1, **self.to_dict()}
        return json.dumps(document, indent=indent, sort_keys=True, ensure_ascii=False)


# ============================================================================
# Configuration Loading
# ============================================================================


def load_config_file(path: str | Path) -> dict[str, Any]:
    """
    Load configuration from JSON file.

    Raises:
        ConfigError: If file cannot be loaded or parsed.
    """
    config_path = Path(path)

    if not config_path.exists():
        raise ConfigError(f"Configuration file not found: {config_path}")

    try:
        with open(config_path, encoding="utf-8") as f:
            config_data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in {config_path}: {e}") from e
    except OSError as e:
        raise ConfigError(f"Failed to read {config_path}: {e}") from e

    if not isinstance(config_data, dict):
        raise ConfigError(f"Configuration file must contain JSON object: {config_path}")
    # Saved configurations carry an envelope
    config_data = {k: v for k, v in config_data.items() if k not in ("format", "version")}
    logger.info("Loaded config from: %s", config_path)
    return config_data


def load_config(
    config_file: str | Path | None = None,
    custom_config: dict[str, Any] | None = None,
) -> RunConfig:
    """
    Load configuration from multiple sources.

    Priority (highest to lowest):
    1. custom_config (command-line overrides)
    2. config_file (JSON file)
    3. Defaults (from RunConfig)

    Raises:
        ConfigError: If configuration is invalid.
    """
    base_config = RunConfig()

    if config_file:
        base_config = base_config.merge(load_config_file(config_file))

    if custom_config:
        base_config = base_config.merge(custom_config)

    return base_config


def save_config(config: RunConfig, output_path: str | Path) -> None:
    """
    Save configuration to JSON file.

    Raises:
        ConfigError: If file cannot be written.
    """
    path = Path(output_path)

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(config.to_json() + "\n", encoding="utf-8")
        logger.info("Saved config to: %s", path)
    except OSError as e:
        raise ConfigError(f"Failed to save configuration to {path}: {e}") from e
