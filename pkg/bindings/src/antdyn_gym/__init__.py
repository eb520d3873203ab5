"""Gymnasium-style bindings for the antdyn simulator core."""

from .env import ENV_ID, AntTrailEnv, register

__version__ = "0.1.0"
__all__ = ["ENV_ID", "AntTrailEnv", "register", "__version__"]
