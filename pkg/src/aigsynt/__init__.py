"""SMV-to-AIGER reactive synthesis toolchain.

Pipeline: parse an extended-SMV specification with automaton-based
properties, flatten it to a boolean model, compile model plus property
monitors into an AIGER game circuit (standard or extended), solve the
game symbolically, extract a strategy circuit, and model check the
result.
"""

__version__ = "0.1.0"
