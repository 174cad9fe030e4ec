"""Brute-force models of finite abelian 2-groups, used as test oracles."""

from itertools import product


def elements(orders):
    return list(product(*(range(o) for o in orders)))


def add(x, y, orders):
    return tuple((a + b) % o for a, b, o in zip(x, y, orders))


def closure(gens, orders):
    """The subgroup generated by ``gens``, by breadth-first search."""
    zero = tuple(0 for _ in orders)
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = add(x, g, orders)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def apply(images, x, orders_t):
    out = tuple(0 for _ in orders_t)
    for c, y in zip(x, images):
        for _ in range(c):
            out = add(out, y, orders_t)
    return out
