"""The four benchmark environments behind one stateless stepping contract."""

from __future__ import annotations

from .acrobot import Acrobot
from .base import Env, EnvSpec, StepResult, rk4_step
from .config import default_config, env_params, load_config, parse_config_text
from .doubleint import DoubleIntegrator
from .mountaincar import MountainCar
from .planararm import PlanarArm

ENV_CLASSES: dict[str, type[Env]] = {
    DoubleIntegrator.id: DoubleIntegrator,
    PlanarArm.id: PlanarArm,
    Acrobot.id: Acrobot,
    MountainCar.id: MountainCar,
}

ENV_IDS = tuple(ENV_CLASSES)


def make_env(env_id: str, config: dict[str, float] | None = None) -> Env:
    """Build an environment by string id, applying config overrides."""
    if env_id not in ENV_CLASSES:
        raise ValueError(f"unknown environment {env_id!r}; known: {', '.join(ENV_IDS)}")
    return ENV_CLASSES[env_id](env_params(env_id, config))


__all__ = [
    "Acrobot",
    "DoubleIntegrator",
    "Env",
    "EnvSpec",
    "ENV_CLASSES",
    "ENV_IDS",
    "MountainCar",
    "PlanarArm",
    "StepResult",
    "default_config",
    "env_params",
    "load_config",
    "make_env",
    "parse_config_text",
    "rk4_step",
]
