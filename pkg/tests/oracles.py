"""Independent reference computations shared by the test modules."""
import cmath
import math
import warnings

import numpy as np
from scipy.integrate import quad


def herglotz_quad(arcs, remainder_log_value, z):
    """log F(z) by adaptive quadrature of the Herglotz kernel, piece by piece."""
    pieces = []
    end = 0.0
    for start, length, value in sorted(arcs):
        if start > end:
            pieces.append((end, start, remainder_log_value))
        pieces.append((start, start + length, value))
        end = start + length
    if end < 1.0:
        pieces.append((end, 1.0, remainder_log_value))
    total = 0j
    for a, b, v in pieces:
        if v == 0.0 or b <= a:
            continue

        def kern(s, part):
            zeta = cmath.exp(2j * math.pi * s)
            k = (zeta + z) / (zeta - z)
            return k.real if part == 0 else k.imag

        with warnings.catch_warnings():
            # tolerances sit at the roundoff floor on purpose
            warnings.simplefilter("ignore")
            re = quad(kern, a, b, args=(0,), epsabs=1e-14, epsrel=1e-13, limit=200)[0]
            im = quad(kern, a, b, args=(1,), epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        total += v * complex(re, im)
    return total


def random_positioned(rng: np.random.Generator, max_arcs: int = 6):
    """Disjoint arcs (start, length, log value) in [0, 1] plus a remainder value."""
    n = int(rng.integers(1, max_arcs + 1))
    cuts = np.sort(rng.uniform(0, 1, size=2 * n))
    arcs = [(float(cuts[2 * i]), float(cuts[2 * i + 1] - cuts[2 * i]), float(rng.normal(0, 2))) for i in range(n)]
    arcs = [a for a in arcs if a[1] > 1e-6]
    if not arcs:
        arcs = [(0.25, 0.5, 1.0)]
    return arcs, float(rng.normal(0, 1))


def random_disk_point(rng: np.random.Generator, r_max: float = 0.9) -> complex:
    r = r_max * math.sqrt(rng.uniform())
    return r * cmath.exp(2j * math.pi * rng.uniform())


def random_step(rng: np.random.Generator, max_arcs: int = 12):
    """(ln measure, ln value) arcs with total measure below 1, and a remainder log value."""
    n = int(rng.integers(1, max_arcs + 1))
    w = rng.dirichlet(np.ones(n + 1))
    arcs = [(math.log(m), float(v)) for m, v in zip(w[:n], rng.normal(0, 3, size=n))]
    return arcs, float(rng.normal(0, 1))


def majorized_pair(rng: np.random.Generator, n: int | None = None):
    """(u, v) with equal weights and u = P v for a doubly stochastic P, so u* is majorized by v*."""
    n = n or int(rng.integers(2, 12))
    v = np.exp(rng.normal(0, 2, size=n))
    m = rng.uniform(size=(n, n))
    # Sinkhorn balancing to a doubly stochastic matrix
    for _ in range(200):
        m /= m.sum(axis=1, keepdims=True)
        m /= m.sum(axis=0, keepdims=True)
    u = m @ v
    w = np.full(n, 1.0 / n)
    return u, v, w
