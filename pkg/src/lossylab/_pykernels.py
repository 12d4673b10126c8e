"""Pure-Python exact kernels (fallback for the compiled core).

All quantities are integers: kernel rows are numerators over a shared
denominator and slot weights are unnormalised integer masses.
"""


def _support(w):
    return [(x, v) for x, v in enumerate(w) if v]


def mixture_counts(W, N, m, weights):
    """sum_t prod_i weights[i][t_i] * W[t] over tuples t in [N]^m.

    Rows of W are indexed in mixed radix with position 0 most significant.
    """
    K = len(W[0]) if len(W) else 0
    out = [0] * K
    supports = [_support(weights[i]) for i in range(m)]
    # iterative odometer over the product of supports
    if any(not s for s in supports):
        return out
    idx = [0] * m
    while True:
        t = 0
        coef = 1
        for i in range(m):
            x, v = supports[i][idx[i]]
            t = t * N + x
            coef *= v
        row = W[t]
        for k in range(K):
            if row[k]:
                out[k] += coef * row[k]
        i = m - 1
        while i >= 0:
            idx[i] += 1
            if idx[i] < len(supports[i]):
                break
            idx[i] = 0
            i -= 1
        if i < 0:
            return out


def l1_distance(a, b):
    return sum(abs(x - y) for x, y in zip(a, b))


def stability_l1(W, N, m, weights_a, weights_b):
    """sum_p |mix(weights_a[p]) - mix(weights_b[p])|_1 over a batch p."""
    total = 0
    for wa, wb in zip(weights_a, weights_b):
        total += l1_distance(mixture_counts(W, N, m, wa), mixture_counts(W, N, m, wb))
    return total


def mixture_batch(W, N, m, weights_batch):
    return [mixture_counts(W, N, m, w) for w in weights_batch]
