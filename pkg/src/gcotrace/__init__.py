"""Graph combinatorial optimization tasks, reasoning-trace corpora, and scoring."""

__version__ = "0.1.0"
