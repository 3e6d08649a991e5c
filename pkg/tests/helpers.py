"""Shared test utilities: random system draws and brute-force oracles."""

from __future__ import annotations

import math

import numpy as np

from nhscatter import Port, ScatteringSystem


def random_center(rng: np.random.Generator, n: int, radius: float = 1.0) -> np.ndarray:
    """Entries uniform in the complex disc of the given radius."""
    mag = radius * np.sqrt(rng.random((n, n)))
    ang = 2.0 * math.pi * rng.random((n, n))
    return mag * np.exp(1j * ang)


def random_system(rng: np.random.Generator, n: int | None = None, p: int | None = None,
                  radius: float = 1.0) -> ScatteringSystem:
    if n is None:
        n = int(rng.integers(max(2, p or 2), 7))
    if p is None:
        p = 2 if n < 3 else int(rng.integers(2, 4))
    if p > n:
        raise ValueError("cannot attach more ports than center sites")
    sites = sorted(int(s) for s in rng.permutation(n)[:p])
    if p == 2:
        ports = (Port(sites[0], "left"), Port(sites[1], "right"))
    else:
        ports = tuple(Port(site, f"port{i}") for i, site in enumerate(sites))
    return ScatteringSystem(random_center(rng, n, radius), ports, 1.0)


def random_k(rng: np.random.Generator) -> float:
    return float(rng.uniform(0.05, math.pi - 0.05))


# ---------------------------------------------------------------------------
# brute-force cofactor inverse (kept free of the package's LU path)


def det_laplace(a: list[list[complex]]) -> complex:
    n = len(a)
    if n == 1:
        return a[0][0]
    total = 0.0 + 0.0j
    for c in range(n):
        minor = [row[:c] + row[c + 1:] for row in a[1:]]
        total += (-1) ** c * a[0][c] * det_laplace(minor)
    return total


def cofactor_inverse(matrix: np.ndarray) -> np.ndarray:
    a = [[complex(v) for v in row] for row in matrix]
    n = len(a)
    det = det_laplace(a)
    adj = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for ri, row in enumerate(a) if ri != i]
            adj[j, i] = (-1) ** (i + j) * det_laplace(minor)
    return adj / det
