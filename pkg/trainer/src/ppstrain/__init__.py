"""ppstrain: offline soft actor-critic training on fixed replay buffers.

Consumes pps-buffer v1 files and evaluates policies against an environment
served over the newline-delimited-JSON wire protocol; the buffer stays
frozen for the entire run.
"""

from .data import Dataset, load_buffer
from .envclient import EnvClient, EnvProtocolError
from .sac import Actor, Critic, SacAgent
from .train import EvalPoint, TrainConfig, TrainResult, evaluate, train, write_curve

__version__ = "0.1.0"

__all__ = [
    "Actor",
    "Critic",
    "Dataset",
    "EnvClient",
    "EnvProtocolError",
    "EvalPoint",
    "SacAgent",
    "TrainConfig",
    "TrainResult",
    "evaluate",
    "load_buffer",
    "train",
    "write_curve",
]
