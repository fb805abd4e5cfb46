"""HTTP service wrapping the simulator harness."""

from .app import app, create_app

__all__ = ["app", "create_app"]
