"""Coalition structures and unilateral-deviation primitives.

Agents are dense 0-based integers ``0..n-1``.  Instances transcribed from
1-based sources keep a name table mapping display labels to internal ids
(see :mod:`hedonic_dynamics.instances`).

A *game* object only has to provide two things to work with this module:
an agent count ``n`` and a method ``prefers(agent, a, b) -> int`` returning
the sign of the agent's preference between two coalitions she belongs to
(positive: ``a`` strictly better, zero: indifferent, negative: worse).
Everything here is immutable and side-effect free.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

#: Hard cap on supported instance sizes; enough for every bundled instance
#: and generated gadget while keeping id arithmetic obviously safe.
MAX_AGENTS = 10**6

Coalition = tuple[int, ...]


class CoreError(ValueError):
    """Base class for structural errors raised by this module."""


class InvalidTarget(CoreError):
    """A deviation names a target that does not exist in the partition,
    or a target already containing the deviator."""


class AgentNotInCoalition(CoreError):
    """A preference query names a coalition the agent is not part of."""


class Ordering(enum.Enum):
    PREFER = 1
    INDIFFERENT = 0
    DISPREFER = -1

    @staticmethod
    def from_sign(sign: int) -> "Ordering":
        if sign > 0:
            return Ordering.PREFER
        if sign < 0:
            return Ordering.DISPREFER
        return Ordering.INDIFFERENT


class StabilityKind(enum.Enum):
    NASH = "nash"
    IS = "is"
    CIS = "cis"


class _NewSingleton:
    """Sentinel target: the deviator founds a fresh singleton coalition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NewSingleton"


NEW_SINGLETON = _NewSingleton()


def coalition(members: Iterable[int]) -> Coalition:
    """Normalize ``members`` into a coalition tuple (sorted, distinct, nonempty)."""
    out = tuple(sorted(members))
    if not out:
        raise CoreError("a coalition must be nonempty")
    for a, b in zip(out, out[1:]):
        if a == b:
            raise CoreError(f"duplicate agent {a} in coalition")
    if out[0] < 0 or out[-1] >= MAX_AGENTS:
        raise CoreError("agent ids must lie in [0, MAX_AGENTS)")
    return out


@dataclass(frozen=True)
class DeviationMove:
    """Unilateral move of ``agent`` into an existing coalition or a new singleton.

    ``target`` is the welcoming coalition *before* the move (canonical member
    tuple), or :data:`NEW_SINGLETON`.
    """

    agent: int
    target: Coalition | _NewSingleton

    def __post_init__(self):
        if self.target is not NEW_SINGLETON:
            object.__setattr__(self, "target", coalition(self.target))
            if self.agent in self.target:
                raise InvalidTarget(
                    f"agent {self.agent} already belongs to target {self.target}"
                )

    def joins_new_singleton(self) -> bool:
        return self.target is NEW_SINGLETON

    def __repr__(self):
        tgt = "new" if self.target is NEW_SINGLETON else set(self.target)
        return f"Move({self.agent} -> {tgt})"


class Partition:
    """Disjoint cover of ``0..n-1`` by coalitions, stored in canonical order.

    Blocks are internally sorted and listed lexicographically, so two equal
    partitions are structurally identical and hash alike.
    """

    __slots__ = ("blocks", "n", "_home")

    def __init__(self, blocks: Iterable[Iterable[int]]):
        normalized = sorted(coalition(b) for b in blocks)
        self.blocks: tuple[Coalition, ...] = tuple(normalized)
        total = 0
        seen = set()
        for b in self.blocks:
            total += len(b)
            seen.update(b)
        self.n = total
        if len(seen) != total or (total and (min(seen) != 0 or max(seen) != total - 1)):
            raise CoreError("blocks must disjointly cover 0..n-1")
        self._home = None

    @staticmethod
    def singletons(n: int) -> "Partition":
        return Partition([(i,) for i in range(n)])

    @staticmethod
    def grand(n: int) -> "Partition":
        return Partition([range(n)])

    def _home_table(self):
        if self._home is None:
            home = [None] * self.n
            for b in self.blocks:
                for a in b:
                    home[a] = b
            self._home = home
        return self._home

    def coalition_of(self, agent: int) -> Coalition:
        if not 0 <= agent < self.n:
            raise CoreError(f"agent {agent} out of range for n={self.n}")
        return self._home_table()[agent]

    def __eq__(self, other):
        return isinstance(other, Partition) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        inner = ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)
        return f"Partition[{inner}]"


CanonicalForm = bytes


def canonicalize(partition: Partition) -> CanonicalForm:
    """Byte encoding that is equal iff the partitions are equal."""
    return b"|".join(b",".join(str(a).encode() for a in b) for b in partition.blocks)


def apply(partition: Partition, move: DeviationMove) -> Partition:
    """Apply a deviation mechanically; the abandoned coalition is dropped if emptied.

    Raises :class:`InvalidTarget` if the target coalition is not part of the
    partition.  Moving from a singleton to a new singleton reproduces the
    input partition (such a move is never an improvement, see the deviation
    predicates).
    """
    cur = partition.coalition_of(move.agent)
    new_blocks = [b for b in partition.blocks if b is not cur]
    if move.target is NEW_SINGLETON:
        post = (move.agent,)
    else:
        if move.target not in partition.blocks:
            raise InvalidTarget(f"target {move.target} is not a coalition of the partition")
        post = coalition(move.target + (move.agent,))
        new_blocks.remove(move.target)
    remainder = tuple(a for a in cur if a != move.agent)
    if remainder:
        new_blocks.append(remainder)
    new_blocks.append(post)
    return Partition(new_blocks)


def compare(game, agent: int, a: Iterable[int], b: Iterable[int]) -> Ordering:
    """The agent's preference between two of her own coalitions (total preorder)."""
    ca = coalition(a)
    cb = coalition(b)
    if agent not in ca:
        raise AgentNotInCoalition(f"agent {agent} not in {ca}")
    if agent not in cb:
        raise AgentNotInCoalition(f"agent {agent} not in {cb}")
    return Ordering.from_sign(game.prefers(agent, ca, cb))


def _post_and_welcoming(partition, move):
    cur = partition.coalition_of(move.agent)
    if move.target is NEW_SINGLETON:
        return cur, (move.agent,), ()
    if move.target not in partition.blocks:
        raise InvalidTarget(f"target {move.target} is not a coalition of the partition")
    return cur, coalition(move.target + (move.agent,)), move.target


def deviation_failure(game, partition, move, kind: StabilityKind) -> str | None:
    """``None`` if the move is a deviation of the requested kind, else a
    human-readable reason naming the failing condition and agent."""
    cur, post, welcoming = _post_and_welcoming(partition, move)
    if game.prefers(move.agent, post, cur) <= 0:
        return (
            f"agent {move.agent} does not strictly improve by moving to "
            f"{set(post)} (current {set(cur)})"
        )
    if kind is StabilityKind.NASH:
        return None
    for member in welcoming:
        if game.prefers(member, post, welcoming) < 0:
            return (
                f"member {member} of the welcoming coalition {set(welcoming)} "
                f"is strictly worse off after agent {move.agent} joins"
            )
    if kind is StabilityKind.IS:
        return None
    remainder = tuple(x for x in cur if x != move.agent)
    for member in remainder:
        if game.prefers(member, remainder, cur) < 0:
            return (
                f"member {member} of the abandoned coalition {set(cur)} does not "
                f"consent to agent {move.agent} leaving"
            )
    return None


def is_deviation_of_kind(game, partition, move, kind: StabilityKind) -> bool:
    return deviation_failure(game, partition, move, kind) is None


def iter_deviations(
    game, partition: Partition, kind: StabilityKind
) -> Iterator[DeviationMove]:
    """Deviations in deterministic order: ascending agent, then existing
    targets in canonical partition order, then the new-singleton target."""
    blocks = partition.blocks
    for agent in range(partition.n):
        cur = partition.coalition_of(agent)
        for block in blocks:
            if block is cur:
                continue
            move = DeviationMove(agent, block)
            if is_deviation_of_kind(game, partition, move, kind):
                yield move
        if len(cur) > 1:
            move = DeviationMove(agent, NEW_SINGLETON)
            if is_deviation_of_kind(game, partition, move, kind):
                yield move


def enumerate_deviations(game, partition, kind: StabilityKind) -> list[DeviationMove]:
    return list(iter_deviations(game, partition, kind))


def is_stable(game, partition, kind: StabilityKind) -> bool:
    """True iff no deviation of the requested kind exists."""
    for _ in iter_deviations(game, partition, kind):
        return False
    return True


def relabel_partition(partition: Partition, perm: Sequence[int]) -> Partition:
    """Apply an agent relabeling (``new_id = perm[old_id]``)."""
    return Partition([[perm[a] for a in b] for b in partition.blocks])
