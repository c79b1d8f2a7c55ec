"""Hypothesis strategies built on the library's seeded samplers."""
import random

from hypothesis import strategies as st

from tdscale.field import FieldContext, random_element
from tdscale.matrix import random_matrix

FIELD_SPECS = ["laurent:2", "laurent:3", "laurent:5", "padic:2", "padic:3", "padic:5"]

contexts = st.sampled_from(FIELD_SPECS).map(FieldContext.from_spec)
laurent_contexts = st.sampled_from(["laurent:2", "laurent:3", "laurent:5"]).map(FieldContext.from_spec)


@st.composite
def elements(draw, ctx=None, nonzero=False):
    ctx = ctx or draw(contexts)
    rng = random.Random(draw(st.integers(0, 2 ** 32)))
    return random_element(ctx, rng, -3, 3, 2, allow_zero=not nonzero)


@st.composite
def element_pairs(draw, nonzero=False):
    ctx = draw(contexts)
    return draw(elements(ctx, nonzero)), draw(elements(ctx, nonzero))


@st.composite
def invertible_matrices(draw, ctx=None, sizes=(1, 2, 3)):
    ctx = ctx or draw(contexts)
    n = draw(st.sampled_from(sizes))
    rng = random.Random(draw(st.integers(0, 2 ** 32)))
    return random_matrix(ctx, n, rng, -2, 2, 1)


@st.composite
def laurent_polynomials(draw, ctx=None):
    ctx = ctx or draw(laurent_contexts)
    terms = draw(st.dictionaries(st.integers(-8, 8), st.integers(0, ctx.p - 1), max_size=8))
    return ctx.laurent(terms)
