"""
roughforge Commands

The operations the command line exposes: trees, bch, lift, psi, act,
solve, bcfp, verify and config.
"""
