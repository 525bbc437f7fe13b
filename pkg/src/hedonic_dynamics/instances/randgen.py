"""Seeded random instances for each game family.

``random(kind, n, seed, restrictions)`` returns a bundled instance whose
claims assert exactly the restrictions that were requested, so a caller (or
test) can re-check them with the stock claim machinery.  Generation uses the
library's own deterministic generator: the same arguments always produce the
same game, on any platform.
"""

from __future__ import annotations

from ..core import Partition
from ..games import (
    AnonymousGame,
    Color,
    DichotomousGame,
    DiversityGame,
    FractionalGame,
    RatioDomain,
    SizeDomain,
    WeakOrder,
)
from ..prng import SplitMix64
from .catalog import Claim, NamedInstance


class InconsistentRestrictions(ValueError):
    """The requested restrictions contradict each other or the kind."""


GENERATOR_KINDS = ("ahg", "hdg", "fhg", "dhg")

_DEFAULTS = {
    "ahg": {"strict": False, "natural-sp": False},
    "hdg": {"strict": False, "natural-sp": False, "reds": None},
    "fhg": {"family": "general", "low": -9, "high": 9},
    "dhg": {"symmetric": False, "density": 30},
}

_FHG_FAMILIES = ("general", "simple-symmetric", "dag", "symmetric-nonnegative")

#: explicit approval families enumerate every coalition
_DHG_GEN_CAP = 14
#: ratio axes are materialised agent by agent
_HDG_GEN_CAP = 64


def _merge(kind: str, restrictions) -> dict:
    merged = dict(_DEFAULTS[kind])
    for key, value in (restrictions or {}).items():
        if key not in merged:
            raise InconsistentRestrictions(
                f"{kind} knows restrictions {sorted(merged)}; got {key!r}"
            )
        merged[key] = value
    return merged


def _shuffled_classes(rng: SplitMix64, keys, strict: bool):
    """A uniformly shuffled order; when not strict, neighbours may tie."""
    pool = list(keys)
    rng.shuffle(pool)
    classes = []
    for key in pool:
        if classes and not strict and rng.chance(3, 10):
            classes[-1].append(key)
        else:
            classes.append([key])
    return classes


def _hill_classes(rng: SplitMix64, keys, strict: bool):
    """An order that rises to a random peak and falls, along the given axis.

    Built by merging the two slopes from the best key downward; ties (when
    allowed) only glue neighbouring entries of the merged sequence, which
    keeps the hill shape intact.
    """
    keys = list(keys)
    peak = rng.below(len(keys))
    left = list(range(peak, -1, -1))
    right = list(range(peak + 1, len(keys)))
    merged = []
    li = ri = 0
    while li < len(left) or ri < len(right):
        take_left = ri >= len(right) or (li < len(left) and rng.chance(1, 2))
        if take_left:
            merged.append(keys[left[li]])
            li += 1
        else:
            merged.append(keys[right[ri]])
            ri += 1
    classes = [[merged[0]]]
    for key in merged[1:]:
        if not strict and rng.chance(3, 10):
            classes[-1].append(key)
        else:
            classes.append([key])
    return classes


def _random_ahg(n: int, rng: SplitMix64, opts: dict):
    strict, hill = opts["strict"], opts["natural-sp"]
    dom = SizeDomain(n)
    keys = list(dom.enumerate())
    make = _hill_classes if hill else _shuffled_classes
    orders = [WeakOrder(make(rng, keys, strict)) for _ in range(n)]
    game = AnonymousGame(orders)
    claims = []
    if strict:
        claims.append(Claim("strict"))
    if hill:
        claims.append(Claim("natural-sp"))
    return game, claims


def _random_hdg(n: int, rng: SplitMix64, opts: dict):
    if n > _HDG_GEN_CAP:
        raise InconsistentRestrictions(
            f"hdg generation enumerates the ratio axis; n must be <= {_HDG_GEN_CAP}"
        )
    reds = opts["reds"] if opts["reds"] is not None else n // 2
    if not isinstance(reds, int) or not 0 <= reds <= n:
        raise InconsistentRestrictions(f"reds must be an integer in 0..{n}; got {reds!r}")
    strict, hill = opts["strict"], opts["natural-sp"]
    colors = [Color.RED] * reds + [Color.BLUE] * (n - reds)
    rng.shuffle(colors)
    keys = sorted(RatioDomain(reds, n - reds).enumerate())
    make = _hill_classes if hill else _shuffled_classes
    orders = [WeakOrder(make(rng, keys, strict)) for _ in range(n)]
    game = DiversityGame(colors, orders)
    claims = []
    if strict:
        claims.append(Claim("strict"))
    if hill:
        claims.append(Claim("natural-sp"))
    return game, claims


def _random_fhg(n: int, rng: SplitMix64, opts: dict):
    family = opts["family"]
    if family not in _FHG_FAMILIES:
        raise InconsistentRestrictions(
            f"fhg family must be one of {_FHG_FAMILIES}; got {family!r}"
        )
    low, high = opts["low"], opts["high"]
    if low > high:
        raise InconsistentRestrictions(f"low {low} > high {high}")
    weights = [[0] * n for _ in range(n)]
    claims = []
    if family == "general":
        for i in range(n):
            for j in range(n):
                if i != j:
                    weights[i][j] = rng.randint(low, high)
    elif family == "simple-symmetric":
        for i in range(n):
            for j in range(i + 1, n):
                weights[i][j] = weights[j][i] = 1 if rng.chance(2, 5) else 0
        claims.append(Claim("fhg-traits", params={
            "symmetric": True, "simple": True, "nonnegative": True,
        }))
    elif family == "symmetric-nonnegative":
        top = max(high, 1)
        for i in range(n):
            for j in range(i + 1, n):
                weights[i][j] = weights[j][i] = rng.randint(0, top)
        claims.append(Claim("fhg-traits", params={
            "symmetric": True, "nonnegative": True,
        }))
    else:  # dag: arcs only ever point down a hidden shuffled rank
        rank = list(range(n))
        rng.shuffle(rank)
        for i in range(n):
            for j in range(n):
                if rank[i] > rank[j] and rng.chance(2, 5):
                    weights[i][j] = 1
        claims.append(Claim("fhg-traits", params={
            "simple": True, "simple_asymmetric": True, "nonnegative": True,
            "acyclic": True,
        }))
    return FractionalGame(weights), claims


def _random_dhg(n: int, rng: SplitMix64, opts: dict):
    if n > _DHG_GEN_CAP:
        raise InconsistentRestrictions(
            f"dhg generation enumerates every coalition; n must be <= {_DHG_GEN_CAP}"
        )
    density = opts["density"]
    if not isinstance(density, int) or not 1 <= density <= 100:
        raise InconsistentRestrictions(
            f"density must be an integer percentage in 1..100; got {density!r}"
        )
    symmetric = opts["symmetric"]
    approvals = [[] for _ in range(n)]
    for bits in range(1, 1 << n):
        members = [i for i in range(n) if bits >> i & 1]
        if symmetric:
            if rng.chance(density, 100):
                for agent in members:
                    approvals[agent].append(members)
        else:
            for agent in members:
                if rng.chance(density, 100):
                    approvals[agent].append(members)
    game = DichotomousGame(n, approvals)
    claims = [Claim("dhg-symmetric")] if symmetric else []
    return game, claims


_BUILDERS = {
    "ahg": _random_ahg,
    "hdg": _random_hdg,
    "fhg": _random_fhg,
    "dhg": _random_dhg,
}


def random(kind: str, n: int, seed: int, restrictions: dict | None = None) -> NamedInstance:
    """Deterministic random instance of the given family; see module docs."""
    if kind not in _BUILDERS:
        raise InconsistentRestrictions(
            f"unknown kind {kind!r}; known kinds: {', '.join(GENERATOR_KINDS)}"
        )
    if n < 1:
        raise InconsistentRestrictions(f"n must be positive; got {n}")
    opts = _merge(kind, restrictions)
    rng = SplitMix64(seed)
    game, claims = _BUILDERS[kind](n, rng, opts)
    tags = ";".join(f"{k}={v}" for k, v in sorted(opts.items())
                    if v != _DEFAULTS[kind][k])
    suffix = f";{tags}" if tags else ""
    return NamedInstance(
        f"random-{kind}(n={n},seed={seed}{suffix})",
        game,
        {"singletons": Partition.singletons(n)},
        {},
        tuple(claims),
        tuple(str(i + 1) for i in range(n)),
    )
