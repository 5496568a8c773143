"""Fine-tune/serve shim: trains a causal LM on ``<s>sentence</s>`` /
``<s>analysis</s>`` training files and serves ``POST /generate``."""

__version__ = "0.1.0"
