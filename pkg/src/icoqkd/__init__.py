"""Key distribution over an indefinite-causal-order resource: quantum core,
coding/finite-blocklength calculators, the key-agreement engine, and a CLI."""

__version__ = "0.1.0"
