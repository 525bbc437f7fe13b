"""Shared helpers: small random instances built with stdlib RNG only.

These factories are deliberately independent of the package's own random
generator so that cross-checks between the two are meaningful.
"""

import random

from hedonic_dynamics import games
from hedonic_dynamics.core import Partition


def rand_weak_order(rng: random.Random, keys, strict=False) -> games.WeakOrder:
    keys = list(keys)
    rng.shuffle(keys)
    if strict:
        return games.WeakOrder([[k] for k in keys])
    classes = [[keys[0]]]
    for k in keys[1:]:
        if rng.random() < 0.35:
            classes[-1].append(k)
        else:
            classes.append([k])
    return games.WeakOrder(classes)


def rand_sp_order(rng: random.Random, keys, strict=True) -> games.WeakOrder:
    """Single-peaked on the natural axis: random merge of the two slopes."""
    keys = sorted(keys)
    peak_at = rng.randrange(len(keys))
    left = keys[:peak_at][::-1]
    right = keys[peak_at + 1 :]
    order = [keys[peak_at]]
    i = j = 0
    while i < len(left) or j < len(right):
        take_left = j >= len(right) or (i < len(left) and rng.random() < 0.5)
        if take_left:
            order.append(left[i])
            i += 1
        else:
            order.append(right[j])
            j += 1
    if strict:
        return games.WeakOrder([[k] for k in order])
    # merge adjacent entries into ties now and then; contiguous prefixes of a
    # single-peaked strict order stay single-peaked when tied together
    classes = [[order[0]]]
    for k in order[1:]:
        if rng.random() < 0.3:
            classes[-1].append(k)
        else:
            classes.append([k])
    return games.WeakOrder(classes)


def rand_ahg(rng, n, strict=False, sp=False) -> games.AnonymousGame:
    make = rand_sp_order if sp else rand_weak_order
    return games.AnonymousGame([make(rng, range(1, n + 1), strict) for _ in range(n)])


def rand_hdg(rng, reds, blues, strict=False, sp=False) -> games.DiversityGame:
    colors = [games.Color.RED] * reds + [games.Color.BLUE] * blues
    rng.shuffle(colors)
    ratios = games.RatioDomain(reds, blues).enumerate()
    make = rand_sp_order if sp else rand_weak_order
    orders = [make(rng, ratios, strict) for _ in range(reds + blues)]
    return games.DiversityGame(colors, orders)


def rand_fhg(rng, n, lo=-5, hi=5, symmetric=False, simple=False) -> games.FractionalGame:
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if symmetric and j < i:
                continue
            w = rng.randint(0, 1) if simple else rng.randint(lo, hi)
            rows[i][j] = w
            if symmetric:
                rows[j][i] = w
    return games.FractionalGame(rows)


def rand_dag_fhg(rng, n) -> games.FractionalGame:
    """Simple asymmetric acyclic: arcs only from higher to lower id, relabeled."""
    perm = list(range(n))
    rng.shuffle(perm)
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.4:
                rows[perm[j]][perm[i]] = 1
    return games.FractionalGame(rows)


def rand_dhg(rng, n, density=0.3, symmetric=False) -> games.DichotomousGame:
    from itertools import combinations

    all_coalitions = [
        c for size in range(1, n + 1) for c in combinations(range(n), size)
    ]
    if symmetric:
        approved = [c for c in all_coalitions if rng.random() < density]
        families = [[c for c in approved if a in c] for a in range(n)]
    else:
        families = [
            [c for c in all_coalitions if a in c and rng.random() < density]
            for a in range(n)
        ]
    return games.DichotomousGame(n, families)


def rand_partition(rng, n) -> Partition:
    blocks = []
    for agent in range(n):
        if blocks and rng.random() < 0.6:
            rng.choice(blocks).append(agent)
        else:
            blocks.append([agent])
    return Partition(blocks)
