"""Bundled custom operators: delta-evaluation moves for tour problems.

These demonstrate the registration interface. They read the concrete
problem's distance matrix through the opaque handle and use O(1) edge
deltas to pick an improving move instead of re-evaluating whole tours,
then apply it in place. They only make sense for single-row permutation
problems that expose `dist`; on anything else the registration probe
excludes them.
"""

from __future__ import annotations

from .operators import CustomOperator

_SAMPLES = 24  # candidate moves examined per call


def _tour_and_dist(sol, ctx):
    dist = ctx.problem.dist
    size = int(sol.dim2_sizes[0])
    return sol.data[0, :size], dist, size


def _delta_two_opt(sol, rng, ctx):
    """Reverse the segment whose cyclic edge delta is best among samples."""
    tour, dist, n = _tour_and_dist(sol, ctx)
    if n < 4:
        return
    best = None
    for _ in range(_SAMPLES):
        i = rng.randrange(n - 1)
        j = rng.randrange(i + 1, n)
        if i == 0 and j == n - 1:
            continue
        a, b = tour[i - 1], tour[i]
        c, d = tour[j], tour[(j + 1) % n]
        delta = dist[a, c] + dist[b, d] - dist[a, b] - dist[c, d]
        if best is None or delta < best[0]:
            best = (delta, i, j)
        if delta < -1e-12:
            break
    if best is None:
        return
    _, i, j = best
    tour[i:j + 1] = tour[i:j + 1][::-1].copy()


def _delta_or_opt(sol, rng, ctx):
    """Relocate a 2-3 city strip to the sampled position with best delta."""
    tour, dist, n = _tour_and_dist(sol, ctx)
    seg = rng.randrange(2, 4)
    if n < seg + 2:
        return
    start = rng.randrange(n - seg + 1)
    strip = [int(v) for v in tour[start:start + seg]]
    rest = [int(v) for v in tour[:start]] + [int(v) for v in tour[start + seg:]]
    m = len(rest)
    best = None
    for _ in range(_SAMPLES):
        pos = rng.randrange(m + 1)
        prev = rest[pos - 1] if pos > 0 else rest[-1]
        nxt = rest[pos % m]
        delta = dist[prev, strip[0]] + dist[strip[-1], nxt] - dist[prev, nxt]
        if best is None or delta < best[0]:
            best = (delta, pos)
    pos = best[1]
    rebuilt = rest[:pos] + strip + rest[pos:]
    tour[:] = rebuilt


def _delta_node_insert(sol, rng, ctx):
    """Move one city to its best position over the whole tour."""
    tour, dist, n = _tour_and_dist(sol, ctx)
    if n < 4:
        return
    i = rng.randrange(n)
    city = int(tour[i])
    rest = [int(v) for v in tour[:i]] + [int(v) for v in tour[i + 1:]]
    m = len(rest)
    best = None
    for pos in range(m + 1):
        prev = rest[pos - 1] if pos > 0 else rest[-1]
        nxt = rest[pos % m]
        delta = dist[prev, city] + dist[city, nxt] - dist[prev, nxt]
        if best is None or delta < best[0]:
            best = (delta, pos)
    pos = best[1]
    rebuilt = rest[:pos] + [city] + rest[pos:]
    tour[:] = rebuilt


def tsp_delta_operators() -> tuple[CustomOperator, ...]:
    return (
        CustomOperator(100, "delta_two_opt", _delta_two_opt, initial_weight=1.0),
        CustomOperator(101, "delta_or_opt", _delta_or_opt, initial_weight=1.0),
        CustomOperator(102, "delta_node_insert", _delta_node_insert, initial_weight=1.0),
    )


DEMO_OPERATOR_SETS = {
    "tsp-delta": tsp_delta_operators,
}


def demo_operator_set(name: str) -> tuple[CustomOperator, ...]:
    try:
        return DEMO_OPERATOR_SETS[name]()
    except KeyError:
        raise ValueError(
            f"unknown operator set {name!r}; available: "
            f"{', '.join(sorted(DEMO_OPERATOR_SETS))}"
        ) from None
