"""
Compiled sweeps over dyadic grids

All kernels take states as C-contiguous float64 arrays of shape
(points, basis size) and the coproduct of the truncated algebra as
(left, right, out, coef) term arrays.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _convolve_row(f, g, left, right, out, coef, result):
    result[:] = 0.0
    for k in range(out.shape[0]):
        result[out[k]] += coef[k] * f[left[k]] * g[right[k]]


@njit(cache=True)
def prefix_products(increments, left, right, out, coef):
    """States 𝕏_0 = ε, 𝕏_{j+1} = 𝕏_j ⋆ Y_j for consecutive increments Y_j"""
    steps, size = increments.shape
    states = np.zeros((steps + 1, size))
    states[0, 0] = 1.0
    for j in range(steps):
        _convolve_row(states[j], increments[j], left, right, out, coef, states[j + 1])
    return states


@njit(cache=True)
def pairwise_holder(states, inverses, left, right, out, coef, exponents, times, stride):
    """sup over grid pairs s < t of |⟨X_st, v⟩| / |t − s|^{exponent(v)}, per basis element"""
    points, size = states.shape
    best = np.zeros(size)
    buf = np.zeros(size)
    for s in range(0, points, stride):
        for t in range(s + stride, points, stride):
            _convolve_row(inverses[s], states[t], left, right, out, coef, buf)
            dt = times[t] - times[s]
            for i in range(1, size):
                value = abs(buf[i]) / dt ** exponents[i]
                if value > best[i]:
                    best[i] = value
    return best


@njit(cache=True)
def _pair_values(states, inverses, left, right, weights, s, t, values):
    values[:] = 0.0
    for k in range(left.shape[0]):
        product = inverses[s, left[k]] * states[t, right[k]]
        for f in range(weights.shape[1]):
            values[f] += weights[k, f] * product


@njit(cache=True)
def delta_residuals(
    states_a, inverses_a, left_a, right_a, weights_a,
    states_b, inverses_b, left_b, right_b, weights_b,
    stride,
):
    """
    For H_st = ⟨X_st, w_a⟩ − ⟨X̄_st, w_b⟩ (one column of weights per functional),
    return the path f_t = H_{0t} and sup over grid pairs of |H_st − f_t + f_s|.

    Term weights already carry the coproduct coefficient and the functional
    coefficient of the output element.
    """
    points = states_a.shape[0]
    count = weights_a.shape[1]
    base = np.zeros((points, count))
    residual = np.zeros(count)
    va = np.zeros(count)
    vb = np.zeros(count)
    for t in range(1, points):
        _pair_values(states_a, inverses_a, left_a, right_a, weights_a, 0, t, va)
        _pair_values(states_b, inverses_b, left_b, right_b, weights_b, 0, t, vb)
        for f in range(count):
            base[t, f] = va[f] - vb[f]
    for s in range(stride, points, stride):
        for t in range(s + stride, points, stride):
            _pair_values(states_a, inverses_a, left_a, right_a, weights_a, s, t, va)
            _pair_values(states_b, inverses_b, left_b, right_b, weights_b, s, t, vb)
            for f in range(count):
                value = abs(va[f] - vb[f] - base[t, f] + base[s, f])
                if value > residual[f]:
                    residual[f] = value
    return base, residual


@njit(cache=True)
def pairwise_increments(states, inverses, left, right, out, coef, stride):
    """X_st for every pair of the subgrid with the given stride, shape (q, q, size)"""
    points, size = states.shape
    q = (points - 1) // stride + 1
    result = np.zeros((q, q, size))
    for a in range(q):
        for b in range(a + 1, q):
            _convolve_row(
                inverses[a * stride], states[b * stride], left, right, out, coef, result[a, b]
            )
    return result


@njit(cache=True)
def chen_residual(increments, left, right, out, coef):
    """sup over triples s < u < t of |X_su ⋆ X_ut − X_st| / max(1, |X_st|)"""
    q, _, size = increments.shape
    buf = np.zeros(size)
    worst = 0.0
    for a in range(q):
        for b in range(a + 1, q):
            for c in range(b + 1, q):
                _convolve_row(increments[a, b], increments[b, c], left, right, out, coef, buf)
                for i in range(1, size):
                    target = increments[a, c, i]
                    value = abs(buf[i] - target) / max(1.0, abs(target))
                    if value > worst:
                        worst = value
    return worst
