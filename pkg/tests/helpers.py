"""Random exact test data shared by the test modules."""

import random

from genformal.scalars import GaussianRational, Poly
from genformal.spinor import FormVector, GeneralizedVector

Q = GaussianRational.coerce


def rand_scalar(rng, den=4, span=5, complex_=True):
    re = GaussianRational(f"{rng.randint(-span, span)}/{rng.randint(1, den)}")
    if not complex_:
        return re
    return re + GaussianRational(0, f"{rng.randint(-span, span)}/{rng.randint(1, den)}")


def rand_poly(rng, names, max_deg=2, n_terms=3, complex_=True):
    p = Poly()
    for _ in range(n_terms):
        mono = Poly.const(rand_scalar(rng, complex_=complex_))
        for _ in range(rng.randint(0, max_deg)):
            mono = mono * Poly.var(rng.choice(names))
        p = p + mono
    return p


def rand_const_form(rng, chart, n_terms=5, degrees=None):
    items = []
    for _ in range(n_terms):
        mask = rng.randrange(1 << chart.m)
        if degrees is not None and bin(mask).count("1") not in degrees:
            continue
        items.append((mask, rand_scalar(rng)))
    return FormVector.from_terms(chart, items)


def rand_poly_form(rng, chart, n_terms=4, max_deg=2, degrees=None, complex_=True):
    items = []
    for _ in range(n_terms):
        mask = rng.randrange(1 << chart.m)
        if degrees is not None and bin(mask).count("1") not in degrees:
            continue
        items.append((mask, rand_poly(rng, chart.coords, max_deg, 2, complex_)))
    return FormVector.from_terms(chart, items)


def rand_gvector(rng, chart):
    return GeneralizedVector(chart, [rand_scalar(rng) for _ in range(2 * chart.m)])


def rng_for(seed):
    return random.Random(seed)
