"""Nested algebraic model counting over constrained compiled circuits.

The library goes from ground probabilistic logic programs or labeled CNFs,
through definability-aware constrained compilation into smooth deterministic
decomposable circuits, to two-semiring evaluation solving most-probable
assignment, expected-utility maximisation, and stable-model probability
queries.
"""

__version__ = "0.1.0"
