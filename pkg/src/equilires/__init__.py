"""Graph adversarial-resilience toolkit.

Condenses a graph's dynamics into a one-dimensional state, computes the
equilibrium-point trajectory of that state, perturbs graphs with seeded
attacks, purifies attacked adjacency matrices by similarity-guided edge
removal, and numerically verifies the underlying stability theory
(Hurwitz tests, Lyapunov equations, sector conditions, strict positive
realness).

Submodules are imported lazily so that the command-line entry point can
configure threading before any numerical library loads.
"""

__version__ = "0.1.0"

_SUBMODULES = (
    "analysis",
    "attack",
    "cli",
    "defense",
    "dynamics",
    "equilibrium",
    "errors",
    "generators",
    "graph",
    "stability",
)


def __getattr__(name):
    if name in _SUBMODULES:
        import importlib

        return importlib.import_module(f"{__name__}.{name}")
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(list(globals()) + list(_SUBMODULES))
