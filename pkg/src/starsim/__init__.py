"""STAR-RIS multi-user downlink simulator with a learning harness.

Core subpackages: channel models, surface configuration, the physical-layer
pipeline, the decision-process environment, the policy-gradient agent, and
the experiment harness. A FastAPI service (`starsim.service`) exposes the
harness over HTTP; the `starsim` CLI is a thin client of that service.
"""

__version__ = "0.1.0"
