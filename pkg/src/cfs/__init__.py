"""Sequential decentralized conflict resolution through a circular control area."""

__version__ = "0.1.0"
