"""
roughforge Test Suite

- Unit tests for the algebras, BCH, the dyadic construction, the
  Hairer–Kelly map, the action and signatures
- Integration tests for the command layer
- End-to-end tests through the CLI
"""
