"""Hypothesis strategies for closed terms."""

from hypothesis import strategies as st

from ddrs.terms import App


def closed_terms(sig, max_size: int):
    """Closed terms over ``sig`` with at most ``max_size`` symbols."""
    constants = sig.by_arity(0)
    unary = sig.by_arity(1)
    binary = sig.by_arity(2)

    @st.composite
    def build(draw, budget):
        choices = ["leaf"]
        if unary and budget >= 2:
            choices.append("unary")
        if binary and budget >= 3:
            choices.append("binary")
        kind = draw(st.sampled_from(choices))
        if kind == "leaf":
            return App(draw(st.sampled_from(constants)))
        if kind == "unary":
            child = draw(build(budget - 1))
            return App(draw(st.sampled_from(unary)), (child,))
        left_budget = draw(st.integers(1, budget - 2))
        left = draw(build(left_budget))
        right = draw(build(budget - 1 - left.size))
        return App(draw(st.sampled_from(binary)), (left, right))

    return build(max_size)
