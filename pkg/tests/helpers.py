"""Brute-force reference computations used by several test modules."""

import numpy as np


def double_loop_form(P, v):
    """sum_{i != j} v_i P_ij v_j by explicit loops."""
    n = len(v)
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                total += v[i] * P[i, j] * v[j]
    return total


def double_loop_k(P):
    """sum_{i != j} P_ij^2 by explicit loops."""
    n = P.shape[0]
    return sum(P[i, j] ** 2 for i in range(n) for j in range(n) if i != j)


def direct_ridge(Z, theta):
    """Z (Z'Z + theta I)^{-1} Z' by a dense solve."""
    K = Z.shape[1]
    return Z @ np.linalg.solve(Z.T @ Z + theta * np.eye(K), Z.T)


def standardized(Z):
    Z = np.asarray(Z, dtype=float)
    return Z / np.sqrt(np.mean(Z * Z, axis=0))
