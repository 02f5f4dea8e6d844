"""Race-game state and the reward rules.

An attempt matches when the recognized point falls in the target's quadrant
and within 0.6 of its canonical point.  Coins: 2 when the recognized category
also equals the target, 1 for a plain match, 0 otherwise.  The player moves
one step per match; the robot follows a deterministic schedule derived from
the seed (default: every second turn).  Whoever reaches the end first wins;
when both arrive on the same turn the player wins.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

from ..emotionml import AVPoint, EmotionAnnotation, to_internal
from .vocabulary import DEFAULT_VOCABULARY, EmotionVocabulary, UnknownEmotion, quadrant

MATCH_DISTANCE = 0.6
QUIZ_PASS_RATIO = 0.8
DEFAULT_BOARD_LEN = 10

MODALITIES = ("face", "voice", "body")

LOCKED = "locked"
UNLOCKED = "unlocked"
PASSED = "passed"


class GameError(Exception):
    pass


class GameFinished(GameError):
    """Attempt to step a race that already has a winner."""


class UnitLocked(GameError):
    """Quiz submitted for a unit that is not yet unlocked."""


class InsufficientFunds(GameError):
    """Wallet cannot cover the price."""


class BadCounts(GameError):
    """Quiz or survey counts are inconsistent."""


@dataclass(frozen=True)
class AttemptResult:
    recognized: AVPoint
    recognized_label: str | None
    distance: float
    match: bool
    coins: int


def evaluate_attempt(
    target: str,
    recognized: EmotionAnnotation,
    vocabulary: EmotionVocabulary = DEFAULT_VOCABULARY,
    match_distance: float = MATCH_DISTANCE,
) -> AttemptResult:
    """Score a recognition result against the target emotion."""
    if target not in vocabulary:
        raise UnknownEmotion(f"{target!r} is not a platform emotion")
    canonical = vocabulary.canonical_point(target)
    point = to_internal(recognized)
    distance = math.dist((point.arousal, point.valence), (canonical.arousal, canonical.valence))
    match = quadrant(point) == quadrant(canonical) and distance <= match_distance
    if match and recognized.category == target:
        coins = 2
    elif match:
        coins = 1
    else:
        coins = 0
    return AttemptResult(
        recognized=point,
        recognized_label=recognized.category,
        distance=distance,
        match=match,
        coins=coins,
    )


def robot_moves(seed: int, turn: int, policy: str = "every2") -> bool:
    """Deterministic robot schedule; replayable from (seed, turn) alone."""
    if policy == "every2":
        return turn % 2 == 0
    if policy == "random":
        return random.Random(seed * 1_000_003 + turn).random() < 0.5
    raise ValueError(f"unknown robot policy {policy!r}")


def default_progression(units: tuple[str, ...]) -> dict[str, str]:
    return {unit: (UNLOCKED if i == 0 else LOCKED) for i, unit in enumerate(units)}


@dataclass(frozen=True)
class GameState:
    rng_seed: int = 0
    board_len: int = DEFAULT_BOARD_LEN
    target: str | None = None
    modality: str | None = None
    player_pos: int = 0
    robot_pos: int = 0
    wallet: int = 0
    turn: int = 0
    winner: str | None = None
    robot_policy: str = "every2"
    progression: dict[str, str] = field(
        default_factory=lambda: default_progression(DEFAULT_VOCABULARY.labels)
    )

    def __post_init__(self) -> None:
        if self.board_len < 1:
            raise ValueError("board_len must be >= 1")
        if not 0 <= self.player_pos <= self.board_len or not 0 <= self.robot_pos <= self.board_len:
            raise ValueError("positions must stay on the board")
        if self.wallet < 0:
            raise ValueError("wallet must be non-negative")


def race_step(state: GameState, result: AttemptResult) -> GameState:
    """Advance one turn: player on a match, robot per its schedule."""
    if state.winner is not None:
        raise GameFinished(f"the race is over, {state.winner} won")
    turn = state.turn + 1
    player_pos = min(state.player_pos + (1 if result.match else 0), state.board_len)
    robot_pos = state.robot_pos
    if robot_moves(state.rng_seed, turn, state.robot_policy):
        robot_pos = min(robot_pos + 1, state.board_len)
    winner = None
    if player_pos >= state.board_len:
        winner = "player"
    elif robot_pos >= state.board_len:
        winner = "robot"
    return replace(
        state,
        turn=turn,
        player_pos=player_pos,
        robot_pos=robot_pos,
        wallet=state.wallet + result.coins,
        winner=winner,
    )


def wallet_spend(state: GameState, price: int) -> GameState:
    if price < 0:
        raise ValueError("price must be >= 0")
    if state.wallet < price:
        raise InsufficientFunds(f"wallet {state.wallet} cannot cover {price}")
    return replace(state, wallet=state.wallet - price)


def quiz_progression(
    progression: dict[str, str],
    unit: str,
    correct: int,
    total: int,
    pass_ratio: float = QUIZ_PASS_RATIO,
) -> dict[str, str]:
    """Pass the unit and unlock its successor when correct/total clears 0.8.

    Passed units never revert; retries on a failed quiz are allowed.
    """
    if total <= 0 or correct < 0 or correct > total:
        raise BadCounts(f"bad quiz counts {correct}/{total}")
    if unit not in progression:
        raise UnknownEmotion(f"unknown unit {unit!r}")
    status = progression[unit]
    if status == LOCKED:
        raise UnitLocked(f"unit {unit!r} is locked")
    if correct / total < pass_ratio or status == PASSED:
        return dict(progression)
    updated = dict(progression)
    updated[unit] = PASSED
    units = list(progression)
    index = units.index(unit)
    if index + 1 < len(units) and updated[units[index + 1]] == LOCKED:
        updated[units[index + 1]] = UNLOCKED
    return updated
