"""Minimal convolutional networks that learn Game of Life transitions.

Modules: ``gol`` (exact automaton), ``network`` (23-parameter CNN block with
manual gradients), ``optim`` (ten first-order optimizers), ``data`` (random
and fixed training boards), ``harness`` (training runs, experiments, sweeps,
reports) and ``cli``.
"""

__version__ = "0.1.0"
