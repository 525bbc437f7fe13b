"""Individually-stable deviation dynamics in hedonic games.

Subpackages and modules:

- :mod:`hedonic_dynamics.core` — partitions, deviation moves, stability predicates
- :mod:`hedonic_dynamics.games` — the four supported game classes and their checkers
- :mod:`hedonic_dynamics.dynamics` — deviation schedulers, traces, replay
- :mod:`hedonic_dynamics.potentials` — run monitors (pair count, ascent credit, lex)
- :mod:`hedonic_dynamics.search` — exhaustive existence / reachability / convergence
- :mod:`hedonic_dynamics.instances` — bundled instances, reductions, random generators
- :mod:`hedonic_dynamics.cli` — ``hedyn`` command-line interface
"""

__version__ = "0.1.0"
