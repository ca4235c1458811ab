"""Python bindings for the nmmo many-agent survival engine.

Observations are dicts with ``tiles`` (int32, shape (crop*crop, 3), columns
``TILE_COLUMNS``), ``entities`` (int32, columns ``ENTITY_COLUMNS``) and
``self`` (row of the observing agent in ``entities``).

Actions are dicts keyed by agent id. Each value is
``{"move": direction index or None, "attack": (style index, target id) or None}``
with directions indexed by ``DIRECTIONS`` and styles by ``STYLES``. Malformed
entries are reported in infos and never raise.
"""

from __future__ import annotations

import copy
import json
import os
from typing import Any, Mapping, Optional, Sequence

from . import _core

__version__ = "1.0.0"

_EXPECTED_ABI = 1
if _core.BINDING_ABI != _EXPECTED_ABI:
    raise ImportError(
        f"nmmo_engine native module ABI {_core.BINDING_ABI} does not match the Python layer ({_EXPECTED_ABI})"
    )

ENGINE_VERSION: str = _core.ENGINE_VERSION
TILE_COLUMNS: list = list(_core.TILE_COLUMNS)
ENTITY_COLUMNS: list = list(_core.ENTITY_COLUMNS)
DIRECTIONS: list = list(_core.DIRECTIONS)
STYLES: list = list(_core.STYLES)
ConfigError = _core.ConfigError
OverlayError = _core.OverlayError


def _merge(base: dict, overrides: Mapping[str, Any]) -> dict:
    out = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config(source: "str | Mapping[str, Any]" = "SmallMaps", **overrides: Any) -> dict:
    """Config as a validated dict.

    ``source`` is "SmallMaps", "LargeMaps", a path to a JSON file, or a dict
    of fields (missing fields take defaults). Keyword overrides are merged on
    top, nested sections included.
    """
    if isinstance(source, Mapping):
        base = json.loads(_core.normalize_config(json.dumps(dict(source))))
    elif source in ("SmallMaps", "LargeMaps"):
        base = json.loads(_core.canonical_config(source))
    elif os.path.exists(source):
        with open(source, encoding="utf-8") as f:
            base = json.loads(_core.normalize_config(f.read()))
    else:
        raise ConfigError(f"unknown config {source!r}")
    return json.loads(_core.normalize_config(json.dumps(_merge(base, overrides))))


def policy_presets() -> list:
    return list(_core.policy_presets())


class Env:
    """Multi-agent environment over a pool of generated maps.

    With no ``map_seeds`` the pool is the single map generated from the
    config seed. One instance must not be shared between threads.
    """

    def __init__(self, config: "str | Mapping[str, Any]" = "SmallMaps",
                 map_seeds: Optional[Sequence[int]] = None, **overrides: Any):
        self.config = load_config(config, **overrides)
        self._env = _core.Env(json.dumps(self.config), list(map_seeds) if map_seeds else None)

    def reset(self, seed: Optional[int] = None) -> dict:
        return self._env.reset(seed)

    def step(self, actions: Mapping[Any, Any]):
        """Returns (observations, rewards, dones, infos), each keyed by agent id."""
        return self._env.step(dict(actions))

    def close(self) -> None:
        self._env.close()

    @property
    def closed(self) -> bool:
        return self._env.closed

    @property
    def tick(self) -> int:
        return self._env.tick

    @property
    def episode_over(self) -> bool:
        return self._env.episode_over

    @property
    def episode_seed(self) -> int:
        return self._env.episode_seed

    def digest(self) -> int:
        return self._env.digest()

    def observations(self) -> dict:
        return self._env.observations()

    def lifetime_logs(self) -> list:
        return self._env.lifetime_logs()

    def overlay_names(self) -> list:
        return self._env.overlay_names()

    def overlay(self, name: str):
        return self._env.overlay(name)

    def update_overlay(self, name: str, grid) -> None:
        import numpy as np

        self._env.update_overlay(name, np.ascontiguousarray(grid, dtype=np.float64))

    def __enter__(self) -> "Env":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class ScriptedPolicy:
    """A built-in scripted policy acting for every live agent of an Env."""

    def __init__(self, preset: str):
        self._policy = _core.ScriptedPolicy(preset)

    @property
    def name(self) -> str:
        return self._policy.name

    def act(self, env: Env) -> dict:
        return self._policy.act(env._env)


__all__ = [
    "ConfigError", "DIRECTIONS", "ENGINE_VERSION", "ENTITY_COLUMNS", "Env", "OverlayError", "STYLES",
    "ScriptedPolicy", "TILE_COLUMNS", "load_config", "policy_presets",
]
