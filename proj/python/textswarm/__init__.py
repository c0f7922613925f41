"""Python access to the textswarm simulator.

Configs are plain dicts, nested ({"people": {"count": 50}}) or flat
({"people.count": 50}); overrides are "key=value" strings as on the command line.
"""

from ._core import (
    Artifact,
    ConfigError,
    ContractError,
    EmptyCluster,
    EmptyDescription,
    ProviderError,
    config_keys,
    default_config,
    describe,
    embed,
    read_artifact,
    resolve_config,
    run,
    similarity,
    summarize,
    sweep,
    tokenize,
)

__all__ = [
    "Artifact",
    "ConfigError",
    "ContractError",
    "EmptyCluster",
    "EmptyDescription",
    "ProviderError",
    "config_keys",
    "default_config",
    "describe",
    "embed",
    "read_artifact",
    "resolve_config",
    "run",
    "similarity",
    "summarize",
    "sweep",
    "tokenize",
]
