"""
Core roughforge Components

- Decorated forests, the Connes–Kreimer and shuffle Hopf algebras
- Truncated dual arrays with convolution, exp and log
- BCH, the dyadic construction and its numba kernels
- Hairer–Kelly map, Hölder-family action, BCFP translations, signatures
"""
