import math

import pytest

from career_lab.model import INF, ModelParams


def brute_h(params, n):
    """h_1..h_n written out from the variance-addition rule, independent of the library."""
    hs = [params.h1]
    for _ in range(n - 1):
        post = hs[-1] + params.h_eps
        if params.h_delta is INF:
            hs.append(post)
        else:
            hs.append(1.0 / (1.0 / post + 1.0 / params.h_delta))
    return hs


def brute_gamma(t, params, beta, n_terms=3000):
    """Direct O(n^2) evaluation of the corrected marginal-benefit series, truncated at n_terms."""
    he = params.h_eps
    h = [None] + brute_h(params, t + n_terms + 1)  # 1-based
    total = 0.0
    for s in range(t + 1, t + n_terms + 1):
        prod = 1.0
        for j in range(t, s - 1):
            prod *= h[j + 1] / (h[j] + he)
        total += beta ** (s - t) * he / (h[s - 1] + he) * prod
    return total


@pytest.fixture
def persistent():
    return ModelParams(m1=0.0, h1=1.0, h_eps=1.0, h_delta=INF, beta=0.5)


@pytest.fixture
def stationary_r1():
    h_star = 2.0 / (1.0 + math.sqrt(5.0))
    return ModelParams(m1=0.0, h1=h_star, h_eps=1.0, h_delta=1.0, beta=0.9)
