"""Deviation dynamics: schedulers, traces, replay, and the solitary filter.

A run repeatedly picks an individually-stable deviation (strict improvement
for the mover, weak approval from everyone being joined) and applies it.
The scheduler is pluggable; every applied move is re-validated after the
fact with the plain predicates from :mod:`hedonic_dynamics.core`, so a bug
in the fast move enumeration below cannot silently corrupt a trace.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from . import core
from .core import (
    NEW_SINGLETON,
    Coalition,
    DeviationMove,
    Partition,
    StabilityKind,
    apply,
    canonicalize,
    coalition,
    deviation_failure,
)
from .games import (
    AnonymousGame,
    Color,
    DichotomousGame,
    DiversityGame,
    FractionalGame,
    is_homogeneous,
)
from .prng import SplitMix64


class DynamicsError(RuntimeError):
    pass


class ScriptedMoveInvalid(DynamicsError):
    """A scripted move is not an individually-stable deviation where it occurs."""

    def __init__(self, step_index: int, reason: str):
        super().__init__(f"scripted move at step {step_index} is invalid: {reason}")
        self.step_index = step_index
        self.reason = reason


class FilterStarvation(DynamicsError):
    """Deviations exist but the active filter rejects all of them.

    Deliberately distinct from convergence: the state is *not* stable.
    """

    def __init__(self, step_index: int):
        super().__init__(
            f"at step {step_index} every available deviation is rejected by the filter"
        )
        self.step_index = step_index


# ---------------------------------------------------------------------------
# policies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lexicographic:
    """First deviation in the fixed enumeration order.

    The order (ascending mover id, then target coalitions as listed in the
    canonical partition, then the fresh singleton) is an arbitrary but frozen
    convention; nothing downstream may depend on which admissible deviation
    gets picked, only on the choice being reproducible.
    """


@dataclass(frozen=True)
class SeededRandom:
    """Uniform choice among admissible deviations, driven by splitmix64."""

    seed: int

    def __post_init__(self):
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class Scripted:
    """Play back a fixed move list, validating each move where it occurs."""

    moves: tuple[DeviationMove, ...]

    def __init__(self, moves: Sequence[DeviationMove]):
        object.__setattr__(self, "moves", tuple(moves))


class DeviationFilter(enum.Enum):
    #: reject any move whose target coalition would be single-colored after
    #: the join; founding a fresh singleton is always allowed
    SOLITARY_HOMOGENEITY = "solitary-homogeneity"


@dataclass(frozen=True)
class Filtered:
    base: "Policy"
    criterion: DeviationFilter = DeviationFilter.SOLITARY_HOMOGENEITY


Policy = Lexicographic | SeededRandom | Scripted | Filtered


@dataclass(frozen=True)
class RunConfig:
    max_steps: int = 1_000_000
    detect_cycles: bool = True
    #: monitor factories (see hedonic_dynamics.potentials); each is called
    #: as factory(game, start) and consulted read-only after every step
    monitors: tuple = ()

    def __post_init__(self):
        if self.max_steps < 0:
            raise ValueError("max_steps must be nonnegative")


# ---------------------------------------------------------------------------
# traces and outcomes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    move: DeviationMove
    result: Partition
    readings: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Trace:
    start: Partition
    steps: tuple[TraceStep, ...]
    start_readings: dict = field(default_factory=dict)

    @property
    def final(self) -> Partition:
        return self.steps[-1].result if self.steps else self.start

    @property
    def moves(self) -> tuple[DeviationMove, ...]:
        return tuple(s.move for s in self.steps)

    def states(self) -> list[Partition]:
        return [self.start] + [s.result for s in self.steps]

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class Converged:
    final: Partition
    steps: int
    trace: Trace


@dataclass(frozen=True)
class CycleDetected:
    prefix_len: int
    cycle_len: int
    witness: Trace


@dataclass(frozen=True)
class StepLimitReached:
    trace: Trace


RunOutcome = Converged | CycleDetected | StepLimitReached


@dataclass(frozen=True)
class Script:
    """A stored move sequence together with the partition it starts from."""

    start: Partition
    moves: tuple[DeviationMove, ...]
    note: str = ""


# ---------------------------------------------------------------------------
# fast enumeration of individually-stable deviations
# ---------------------------------------------------------------------------


class MoveFinder:
    """Enumerates IS deviations in the canonical order, with per-coalition
    caches that survive across steps (only the two coalitions touched by a
    move change identity, everything else hits the cache).

    Output must stay move-for-move identical to
    ``core.iter_deviations(game, partition, IS)``; a property test enforces
    this for all four game classes.
    """

    def __init__(self, game):
        self.game = game
        # exact-type dispatch: a subclass may override `prefers`, in which
        # case only the generic path is guaranteed to agree with it
        kind = type(game)
        if kind is AnonymousGame:
            self._iter = self._iter_ahg
            self._welcome: dict = {}
        elif kind is DiversityGame:
            self._iter = self._iter_hdg
            self._welcome = {}
            self._reds: dict = {}
        elif kind is FractionalGame:
            self._iter = self._iter_fhg
            self._sums: dict = {}
        elif kind is DichotomousGame:
            self._iter = self._iter_dhg
        else:
            self._iter = self._iter_generic

    def iter_moves(self, partition: Partition) -> Iterator[DeviationMove]:
        return self._iter(partition)

    def has_move(self, partition: Partition) -> bool:
        for _ in self._iter(partition):
            return True
        return False

    def _iter_generic(self, p):
        return core.iter_deviations(self.game, p, StabilityKind.IS)

    def _iter_ahg(self, p):
        orders = self.game.orders
        cache = self._welcome
        blocks = p.blocks
        welcome = []
        for b in blocks:
            bit = cache.get(b)
            if bit is None:
                s = len(b)
                # a full coalition can never be joined; size n+1 is off-domain
                bit = s < p.n and all(orders[m].compare(s + 1, s) >= 0 for m in b)
                cache[b] = bit
            welcome.append(bit)
        for agent in range(p.n):
            cur = p.coalition_of(agent)
            size_cur = len(cur)
            order = orders[agent]
            for idx, b in enumerate(blocks):
                if b is cur:
                    continue
                if welcome[idx] and order.compare(len(b) + 1, size_cur) > 0:
                    yield DeviationMove(agent, b)
            if size_cur > 1 and order.compare(1, size_cur) > 0:
                yield DeviationMove(agent, NEW_SINGLETON)

    def _block_reds(self, b: Coalition) -> int:
        reds = self._reds.get(b)
        if reds is None:
            colors = self.game.colors
            reds = sum(1 for a in b if colors[a] is Color.RED)
            self._reds[b] = reds
        return reds

    def _iter_hdg(self, p):
        game = self.game
        orders = game.orders
        colors = game.colors
        blocks = p.blocks
        ratios = [Fraction(self._block_reds(b), len(b)) for b in blocks]
        welcome_cache = self._welcome
        for agent in range(p.n):
            cur = p.coalition_of(agent)
            order = orders[agent]
            is_red = colors[agent] is Color.RED
            cur_ratio = Fraction(self._block_reds(cur), len(cur))
            for idx, b in enumerate(blocks):
                if b is cur:
                    continue
                post_ratio = Fraction(self._block_reds(b) + is_red, len(b) + 1)
                if order.compare(post_ratio, cur_ratio) <= 0:
                    continue
                key = (b, is_red)
                bit = welcome_cache.get(key)
                if bit is None:
                    pre_ratio = ratios[idx]
                    bit = all(
                        orders[m].compare(post_ratio, pre_ratio) >= 0 for m in b
                    )
                    welcome_cache[key] = bit
                if bit:
                    yield DeviationMove(agent, b)
            if len(cur) > 1:
                alone = Fraction(1 if is_red else 0)
                if order.compare(alone, cur_ratio) > 0:
                    yield DeviationMove(agent, NEW_SINGLETON)

    def _block_sums(self, b: Coalition):
        sums = self._sums.get(b)
        if sums is None:
            game = self.game
            sums = tuple((m, game.member_sum(m, b)) for m in b)
            self._sums[b] = sums
        return sums

    def _iter_fhg(self, p):
        game = self.game
        weights = game.weights
        blocks = p.blocks
        for agent in range(p.n):
            cur = p.coalition_of(agent)
            row = weights[agent]
            sum_cur = sum(row[j] for j in cur)
            size_cur = len(cur)
            for b in blocks:
                if b is cur:
                    continue
                sum_post = sum(row[j] for j in b)
                s = len(b)
                # strict improvement: sum_post/(s+1) > sum_cur/size_cur
                if sum_post * size_cur <= sum_cur * (s + 1):
                    continue
                welcome = True
                for m, base in self._block_sums(b):
                    if s * weights[m][agent] < base:
                        welcome = False
                        break
                if welcome:
                    yield DeviationMove(agent, b)
            if size_cur > 1 and sum_cur < 0:
                yield DeviationMove(agent, NEW_SINGLETON)

    def _iter_dhg(self, p):
        game = self.game
        approvals = game.approvals
        blocks = p.blocks
        for agent in range(p.n):
            cur = p.coalition_of(agent)
            mine = approvals[agent]
            if cur in mine:
                continue  # already at top utility, no strict improvement
            for b in blocks:
                if b is cur:
                    continue
                post = coalition(b + (agent,))
                if post not in mine:
                    continue
                if all(b not in approvals[m] or post in approvals[m] for m in b):
                    yield DeviationMove(agent, b)
            if len(cur) > 1 and (agent,) in mine:
                yield DeviationMove(agent, NEW_SINGLETON)


def iter_is_deviations(game, partition: Partition, finder: MoveFinder | None = None):
    """IS deviations in deterministic order, using the cached fast paths."""
    if finder is None:
        finder = MoveFinder(game)
    return finder.iter_moves(partition)


# ---------------------------------------------------------------------------
# the run loop
# ---------------------------------------------------------------------------


def passes_filter(game, move: DeviationMove, criterion: DeviationFilter) -> bool:
    """Filter predicate on a move (independent of scheduler state)."""
    if criterion is not DeviationFilter.SOLITARY_HOMOGENEITY:
        raise DynamicsError(f"unknown filter {criterion!r}")
    if move.joins_new_singleton():
        return True
    post = coalition(move.target + (move.agent,))
    return not is_homogeneous(post, game.colors)


def _unwrap_policy(game, policy):
    if isinstance(policy, Filtered):
        base, criterion = policy.base, policy.criterion
        if isinstance(base, Filtered):
            raise DynamicsError("nested filters are not supported")
        if not isinstance(game, DiversityGame):
            raise DynamicsError(
                "the solitary-homogeneity filter needs a two-color game"
            )
        return base, criterion
    return policy, None


def run(game, start: Partition, policy: Policy, config: RunConfig = RunConfig()) -> RunOutcome:
    """Drive the dynamics from ``start`` until convergence, a revisited state,
    or the step budget; see the policy classes for how moves get picked."""
    base, criterion = _unwrap_policy(game, policy)
    finder = MoveFinder(game)
    rng = SplitMix64(base.seed) if isinstance(base, SeededRandom) else None
    script = iter(base.moves) if isinstance(base, Scripted) else None

    monitors = [factory(game, start) for factory in config.monitors]
    start_readings = {m.name: m.initial_reading() for m in monitors}
    steps: list[TraceStep] = []
    state = start
    visited = {canonicalize(start): 0} if config.detect_cycles else None

    def trace():
        return Trace(start, tuple(steps), start_readings)

    for step_index in range(config.max_steps):
        move = None
        if script is not None:
            move = next(script, None)
            if move is None:
                break  # script exhausted; classified below
            fail = _scripted_failure(game, state, move)
            if fail is not None:
                raise ScriptedMoveInvalid(step_index, fail)
            if criterion is not None and not passes_filter(game, move, criterion):
                raise ScriptedMoveInvalid(
                    step_index,
                    "rejected by the solitary-homogeneity filter: the joined "
                    "coalition would be single-colored",
                )
        elif isinstance(base, Lexicographic):
            saw_unfiltered = False
            for cand in finder.iter_moves(state):
                saw_unfiltered = True
                if criterion is None or passes_filter(game, cand, criterion):
                    move = cand
                    break
            if move is None:
                if saw_unfiltered:
                    raise FilterStarvation(step_index)
                return Converged(state, len(steps), trace())
        elif isinstance(base, SeededRandom):
            candidates = list(finder.iter_moves(state))
            if criterion is not None:
                admissible = [
                    c for c in candidates if passes_filter(game, c, criterion)
                ]
            else:
                admissible = candidates
            if not admissible:
                if candidates:
                    raise FilterStarvation(step_index)
                return Converged(state, len(steps), trace())
            move = admissible[rng.below(len(admissible))]
        else:
            raise DynamicsError(f"unknown policy {base!r}")

        post = apply(state, move)
        if script is None:
            # independent re-check with the plain core predicates
            fail = deviation_failure(game, state, move, StabilityKind.IS)
            if fail is not None:
                raise DynamicsError(
                    f"scheduler produced a non-IS move at step {step_index}: {fail}"
                )
        readings = {m.name: m.on_step(state, move, post) for m in monitors}
        steps.append(TraceStep(move, post, readings))
        if visited is not None:
            key = canonicalize(post)
            seen_at = visited.get(key)
            if seen_at is not None:
                return CycleDetected(seen_at, len(steps) - seen_at, trace())
            visited[key] = len(steps)
        state = post

    if finder.has_move(state):
        return StepLimitReached(trace())
    return Converged(state, len(steps), trace())


def _scripted_failure(game, state, move) -> str | None:
    try:
        return deviation_failure(game, state, move, StabilityKind.IS)
    except core.CoreError as exc:
        return str(exc)


def replay(game, start: Partition, moves: Sequence[DeviationMove], monitors=()) -> Trace:
    """Validate and apply a move list; raises :class:`ScriptedMoveInvalid`
    at the first move that is not an IS deviation, naming the violated
    condition and the agent it fails for."""
    mons = [factory(game, start) for factory in monitors]
    start_readings = {m.name: m.initial_reading() for m in mons}
    state = start
    steps = []
    for step_index, move in enumerate(moves):
        fail = _scripted_failure(game, state, move)
        if fail is not None:
            raise ScriptedMoveInvalid(step_index, fail)
        post = apply(state, move)
        readings = {m.name: m.on_step(state, move, post) for m in mons}
        steps.append(TraceStep(move, post, readings))
        state = post
    return Trace(start, tuple(steps), start_readings)


def validate_trace(game, trace: Trace) -> None:
    """Post-hoc check of a finished trace using only core predicates."""
    state = trace.start
    for step_index, step in enumerate(trace.steps):
        fail = deviation_failure(game, state, step.move, StabilityKind.IS)
        if fail is not None:
            raise ScriptedMoveInvalid(step_index, fail)
        post = apply(state, step.move)
        if post != step.result:
            raise ScriptedMoveInvalid(
                step_index, "recorded result does not match applying the move"
            )
        state = post


def reach_state_scripts() -> dict[str, tuple[str, str]]:
    """Directory of bundled scripts as ``script-id -> (instance id, script name)``.

    The moves themselves live on the named instances; look the instance up
    via :func:`hedonic_dynamics.instances.build` and read
    ``instance.scripts[script name]``.
    """
    from .instances import catalog

    return catalog.script_directory()
