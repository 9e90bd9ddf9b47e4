"""Shared fixtures and independent finite-difference oracles."""

import itertools

import numpy as np
import pytest

from centroaffine import HomogeneousPolynomial, classify, make_chart


def fd_gradient(func, x, step=1e-6):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = step
        out[i] = (func(x + e) - func(x - e)) / (2.0 * step)
    return out


def fd_hessian(func, x, step=1e-4):
    """Second differences of values only (independent of any gradient code)."""
    x = np.asarray(x, dtype=float)
    d = len(x)
    out = np.zeros((d, d))
    f0 = func(x)
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = step
        out[i, i] = (func(x + ei) - 2.0 * f0 + func(x - ei)) / step**2
        for j in range(i + 1, d):
            ej = np.zeros(d)
            ej[j] = step
            val = (
                func(x + ei + ej) - func(x + ei - ej) - func(x - ei + ej) + func(x - ei - ej)
            ) / (4.0 * step**2)
            out[i, j] = out[j, i] = val
    return out


def fd_third(func, x, step=1e-4):
    """Central differences of analytic Hessians."""
    x = np.asarray(x, dtype=float)
    d = len(x)
    out = np.zeros((d, d, d))
    for i in range(d):
        e = np.zeros(d)
        e[i] = step
        out[i] = (func.hessian(x + e) - func.hessian(x - e)) / (2.0 * step)
    return out


def cubic_exponents(dim):
    exps = set()
    for combo in itertools.combinations_with_replacement(range(dim), 3):
        e = [0] * dim
        for i in combo:
            e[i] += 1
        exps.add(tuple(e))
    return sorted(exps, reverse=True)


def random_hyperbolic_cubics(count=20, seed=20260809, max_dim=4):
    """Random cubic perturbations of a reference hyperbolic cone, each with a
    chart frame at a verified hyperbolic point."""
    rng = np.random.default_rng(seed)
    dims = [d for d in (2, 3, 4) if d <= max_dim]
    out = []
    attempts = 0
    while len(out) < count and attempts < 50 * count:
        attempts += 1
        d = dims[len(out) % len(dims)]
        terms = {}
        e0 = [0] * d
        e0[0] = 3
        terms[tuple(e0)] = 1.0
        for i in range(1, d):
            e = [0] * d
            e[0] = 1
            e[i] = 2
            terms[tuple(e)] = -1.0
        for e in cubic_exponents(d):
            terms[e] = terms.get(e, 0.0) + 0.15 * rng.uniform(-1.0, 1.0)
        try:
            poly = HomogeneousPolynomial(terms)
        except ValueError:
            continue
        seed_pt = np.zeros(d)
        seed_pt[0] = 1.0
        seed_pt += 0.02 * rng.standard_normal(d)
        try:
            if poly(seed_pt) <= 0.1:
                continue
            frame = make_chart(poly, seed_pt)
            if classify(frame, sample_size=12, seed=3).aggregate != "hyperbolic":
                continue
        except Exception:
            continue
        out.append((poly, frame))
    if len(out) < count:
        raise RuntimeError(f"only generated {len(out)} hyperbolic cubics")
    return out


@pytest.fixture(scope="session")
def catalog_frames():
    from centroaffine import catalog

    return {e.identifier: e.build() for e in catalog.catalog_cubics()}
