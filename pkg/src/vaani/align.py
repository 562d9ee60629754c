"""Frame-to-state forced alignment over 3-state phone HMMs.

Each phone owns a rising, a stable and a falling state; one shared silence
state sits at index 0.  An utterance expands to an optional leading silence,
the three states of each phone in order, and an optional trailing silence.
Alignment finds the monotonic path (self-loop or advance-by-one) through
that chain maximizing the summed log posteriors, with ties broken toward
advancing as early as possible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotFound, ShapeMismatch, TooFewFrames

STATES_PER_PHONE = 3
STATE_SUFFIXES = ("1", "2", "3")  # rising, stable, falling
SILENCE_LABEL = "sil"

# floor keeps zero posteriors finite in log space, so real paths always
# beat the -inf of structurally unreachable trellis cells
PROB_FLOOR = 1e-300


@dataclass(frozen=True)
class HmmTopology:
    """State-id layout: silence at 0, phone i at 1 + 3i + {0,1,2}."""

    phones: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.phones)) != len(self.phones):
            raise ValueError("duplicate phone in topology")
        if SILENCE_LABEL in self.phones:
            raise ValueError("silence is built in, not a phone")

    @property
    def num_states(self) -> int:
        return 1 + STATES_PER_PHONE * len(self.phones)

    def phone_states(self, phone: str) -> tuple[int, int, int]:
        try:
            i = self.phones.index(phone)
        except ValueError:
            raise NotFound("phone %r not in topology" % phone) from None
        base = 1 + STATES_PER_PHONE * i
        return (base, base + 1, base + 2)

    def state_label(self, state_id: int) -> str:
        if state_id == 0:
            return SILENCE_LABEL
        if not 0 < state_id < self.num_states:
            raise NotFound("state id %d out of range" % state_id)
        phone, sub = divmod(state_id - 1, STATES_PER_PHONE)
        return "%s_%s" % (self.phones[phone], STATE_SUFFIXES[sub])

    @property
    def state_labels(self) -> tuple[str, ...]:
        return tuple(self.state_label(s) for s in range(self.num_states))


def topology_from_state_labels(labels) -> HmmTopology:
    """Rebuild a topology from a stored label table (inverse of state_labels)."""
    labels = tuple(labels)
    if not labels or labels[0] != SILENCE_LABEL or (len(labels) - 1) % STATES_PER_PHONE:
        raise ShapeMismatch("label table does not describe a 3-state topology")
    phones = []
    for i in range(1, len(labels), STATES_PER_PHONE):
        trio = labels[i:i + STATES_PER_PHONE]
        base = trio[0].rsplit("_", 1)[0]
        expected = tuple("%s_%s" % (base, s) for s in STATE_SUFFIXES)
        if trio != expected:
            raise ShapeMismatch("malformed state labels %r" % (trio,))
        phones.append(base)
    return HmmTopology(tuple(phones))


def expand_chain(phone_seq, topology: HmmTopology, leading_silence: bool = True,
                 trailing_silence: bool = True) -> list[int]:
    """State-id chain for an utterance's phone sequence."""
    chain: list[int] = [0] if leading_silence else []
    for phone in phone_seq:
        chain.extend(topology.phone_states(phone))
    if trailing_silence:
        chain.append(0)
    if not chain:
        raise ShapeMismatch("empty chain: no phones and no silence")
    return chain


@dataclass(frozen=True)
class AlignmentResult:
    state_ids: tuple[int, ...]
    positions: tuple[int, ...]  # index into the expanded chain, per frame
    log_score: float


def viterbi_chain(posteriors: np.ndarray, chain: list[int]) -> AlignmentResult:
    """Best monotonic path through an explicit state chain."""
    post = np.asarray(posteriors, dtype=np.float64)
    if post.ndim != 2:
        raise ShapeMismatch("posteriors must be a T x S matrix")
    if max(chain) >= post.shape[1]:
        raise ShapeMismatch("chain state %d exceeds posterior columns" % max(chain))
    num_frames, num_pos = post.shape[0], len(chain)
    if num_frames < num_pos:
        raise TooFewFrames(
            "%d frames cannot cover a %d-state chain" % (num_frames, num_pos)
        )
    logpost = np.log(np.maximum(post[:, chain], PROB_FLOOR))  # T x num_pos

    score = np.full((num_frames, num_pos), -np.inf)
    came_from_stay = np.zeros((num_frames, num_pos), dtype=bool)
    score[0, 0] = logpost[0, 0]
    for t in range(1, num_frames):
        stay = score[t - 1]
        advance = np.concatenate(([-np.inf], score[t - 1, :-1]))
        # ties prefer the stay predecessor, which puts every advance at the
        # earliest frame that still permits a full path
        best = np.maximum(stay, advance)
        came_from_stay[t] = stay >= advance
        score[t] = logpost[t] + best

    positions = np.empty(num_frames, dtype=np.int64)
    positions[-1] = num_pos - 1
    for t in range(num_frames - 1, 0, -1):
        pos = positions[t]
        positions[t - 1] = pos if came_from_stay[t, pos] else pos - 1
    return AlignmentResult(
        tuple(chain[p] for p in positions),
        tuple(int(p) for p in positions),
        float(score[-1, -1]),
    )


def viterbi_align(posteriors: np.ndarray, phone_seq, topology: HmmTopology,
                  leading_silence: bool = True,
                  trailing_silence: bool = True) -> AlignmentResult:
    """Align frames to a phone sequence expanded over the topology."""
    chain = expand_chain(phone_seq, topology, leading_silence, trailing_silence)
    return viterbi_chain(posteriors, chain)
