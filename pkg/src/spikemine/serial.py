"""Non-overlapped counting of gap-constrained serial episodes.

One recognizer per candidate: a chain of stages, one per episode node.
Each stage keeps a time list of events accepted there, i.e. events of the
stage's type that extend a gap-valid chain from stage 1. An event is
accepted at stage j > 1 only if some stage j-1 entry lies inside the
incoming window ``(low, high]``; at stage 1 every event of the first type
is accepted. Acceptance at the last stage completes one occurrence: the
count increments and the whole recognizer resets (all time lists cleared,
all stages deactivated back to stage 1), which is exactly what makes the
counted occurrences non-overlapped -- the next occurrence can only use
strictly later events.

The count equals the maximum-cardinality set of non-overlapped valid
occurrences: the recognizer tracks every viable partial match in
parallel, so it completes at the earliest event that finishes any valid
occurrence, and earliest-completion greedy is optimal for this
interval-scheduling structure (the randomized oracle suite checks this
exactly).

A waits index (event type -> stages currently able to consume it) keeps
a pass linear in the events each candidate actually cares about. Stages
of one recognizer enter a waits list in ascending stage order, so on a
shared event type the earlier stage always sees the event first. Time
lists are monotone in time and are pruned from the front once an entry's
outgoing window can no longer reach any future event.

Entries are ``(time, event_index, back)`` tuples; ``back`` links the
predecessor entry that licensed acceptance (kept only when tracking), so
a completed occurrence is recovered by walking the chain.
"""

from __future__ import annotations

import time as _time
from concurrent.futures import ProcessPoolExecutor
from collections import deque
from dataclasses import dataclass

from .episodes import (
    EpisodeCount,
    MiningConfig,
    SerialEpisode,
    bootstrap_serial,
    generate_serial_candidates,
)
from .events import EventSequence


class _Stage:
    __slots__ = (
        "rec", "pos", "etype", "low_in", "high_in", "high_out",
        "tlist", "visited", "prev", "after", "waiting",
    )

    def __init__(self, rec, pos, etype):
        self.rec = rec
        self.pos = pos
        self.etype = etype
        self.low_in = self.high_in = None   # incoming window, stages >= 2
        self.high_out = None                # outgoing window high, stages < last
        self.tlist = deque()
        self.visited = False
        self.prev = None
        self.after = None
        self.waiting = False


class _Recognizer:
    __slots__ = ("episode", "stages", "freq", "occurrences")

    def __init__(self, episode: SerialEpisode):
        self.episode = episode
        self.freq = 0
        self.occurrences: list[tuple[int, ...]] = []
        stages = []
        prev = None
        for pos, etype in enumerate(episode.etypes, 1):
            stage = _Stage(self, pos, etype)
            if pos >= 2:
                iv = episode.intervals[pos - 2]
                stage.low_in, stage.high_in = iv.low, iv.high
            if pos <= episode.size - 1:
                stage.high_out = episode.intervals[pos - 1].high
            stage.prev = prev
            if prev is not None:
                prev.after = stage
            stages.append(stage)
            prev = stage
        self.stages = stages

    def reset(self, waits):
        for stage in self.stages:
            stage.tlist.clear()
            stage.visited = False
            if stage.pos > 1 and stage.waiting:
                waits[stage.etype].remove(stage)
                stage.waiting = False


def count_serial_constrained(
    candidates,
    seq: EventSequence,
    cfg: MiningConfig | None = None,
    *,
    jobs: int = 1,
    forward_prune: bool = True,
    peak_entries: list | None = None,
) -> list[EpisodeCount]:
    """Count all candidates in one pass; returns counts in input order.

    ``forward_prune`` toggles the own-list cleanup a stage performs when
    it consumes an event (drop entries whose outgoing window is already
    behind the stream). It frees memory early and never changes counts;
    the flag exists so the property suite can check exactly that.
    ``peak_entries``, when given an empty list, receives one number per
    candidate: the largest total entry population its recognizer held at
    any point of the pass (a debug/instrumentation hook).
    """
    candidates = list(candidates)
    if not candidates:
        return []
    if jobs > 1 and len(candidates) > 1:
        return _fan_out(_count_serial_chunk, candidates, seq, cfg, jobs, forward_prune)
    track = bool(cfg and cfg.track_occurrences)

    recs = [_Recognizer(ep) for ep in candidates]
    waits: dict[str, list[_Stage]] = {}
    for rec in recs:
        first = rec.stages[0]
        waits.setdefault(first.etype, []).append(first)
        first.waiting = True

    events = seq.events
    for idx in range(len(events)):
        ev = events[idx]
        lst = waits.get(ev.etype)
        if not lst:
            continue
        t = ev.time
        for stage in tuple(lst):
            if not stage.waiting:
                continue
            high_out = stage.high_out
            tl = stage.tlist
            if forward_prune and high_out is not None:
                cut = t - high_out
                while tl and tl[0][0] < cut:
                    tl.popleft()
            if stage.pos == 1:
                entry = (t, idx, None)
                accepted = True
            else:
                prev_tl = stage.prev.tlist
                cut = t - stage.high_in
                while prev_tl and prev_tl[0][0] < cut:
                    prev_tl.popleft()
                limit = t - stage.low_in  # licensed iff predecessor time < limit
                if prev_tl and prev_tl[0][0] < limit:
                    back = None
                    if track:
                        for cand in reversed(prev_tl):
                            if cand[0] < limit:
                                back = cand
                                break
                    entry = (t, idx, back)
                    accepted = True
                else:
                    accepted = False
            if not accepted:
                continue
            if stage.after is not None:
                tl.append(entry)
                if not stage.visited:
                    stage.visited = True
                    nxt = stage.after
                    waits.setdefault(nxt.etype, []).append(nxt)
                    nxt.waiting = True
            else:
                rec = stage.rec
                rec.freq += 1
                if track:
                    chain = []
                    node = entry
                    while node is not None:
                        chain.append(node[1])
                        node = node[2]
                    rec.occurrences.append(tuple(reversed(chain)))
                rec.reset(waits)
        if peak_entries is not None:
            if not peak_entries:
                peak_entries.extend(0 for _ in recs)
            for i, rec in enumerate(recs):
                held = sum(len(stage.tlist) for stage in rec.stages)
                if held > peak_entries[i]:
                    peak_entries[i] = held

    return [
        EpisodeCount(rec.episode, rec.freq, tuple(rec.occurrences) if track else None)
        for rec in recs
    ]


def _count_serial_chunk(args):
    candidates, seq, cfg, forward_prune = args
    return count_serial_constrained(candidates, seq, cfg, forward_prune=forward_prune)


def _fan_out(worker, candidates, seq, cfg, jobs, forward_prune=True):
    """Partition candidates across processes; merge preserves input order."""
    jobs = min(jobs, len(candidates))
    step = (len(candidates) + jobs - 1) // jobs
    chunks = [candidates[i : i + step] for i in range(0, len(candidates), step)]
    with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
        parts = pool.map(worker, [(c, seq, cfg, forward_prune) for c in chunks])
    merged: list[EpisodeCount] = []
    for part in parts:
        merged.extend(part)
    return merged


@dataclass(frozen=True)
class MiningLevel:
    """Frequent episodes of one size, with the pass cost for the level."""

    size: int
    n_candidates: int
    counts: tuple[EpisodeCount, ...]
    seconds: float


def _rank(count: EpisodeCount):
    return (-count.freq, count.episode)


def mine_serial(seq: EventSequence, cfg: MiningConfig, *, jobs: int = 1) -> list[MiningLevel]:
    """Level-wise search: bootstrap, count, filter, join, repeat.

    Stops when a level has no frequent episodes or ``max_size`` is
    reached. Every returned level lists only frequent episodes, sorted by
    descending frequency.
    """
    if not cfg.candidate_intervals:
        raise ValueError("serial mining needs a non-empty candidate interval set")
    floor = cfg.count_floor(len(seq))
    levels: list[MiningLevel] = []
    candidates = bootstrap_serial(seq.alphabet, cfg.candidate_intervals)
    size = 1
    while candidates and size <= cfg.max_size:
        t0 = _time.perf_counter()
        counts = count_serial_constrained(candidates, seq, cfg, jobs=jobs)
        frequent = sorted((c for c in counts if c.freq >= floor), key=_rank)
        levels.append(
            MiningLevel(size, len(candidates), tuple(frequent), _time.perf_counter() - t0)
        )
        if not frequent or size == cfg.max_size:
            break
        seeds = frequent[: cfg.beam_width] if cfg.beam_width else frequent
        candidates = generate_serial_candidates(
            [c.episode for c in seeds], cfg.candidate_intervals
        )
        size += 1
    return levels
