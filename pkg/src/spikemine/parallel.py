"""Non-overlapped counting of parallel episodes under an expiry span.

A recognizer per candidate keeps, for each required event type, the
pending times seen so far that are still within ``expiry`` ticks of the
stream head. When every type's pending list covers its multiplicity, an
occurrence completes using the earliest pending entries per type -- all
retained entries lie within the expiry window of the completing event, so
the selected span is <= expiry by construction, and consuming earliest
entries leaves the freshest ones no longer needed. Completion clears all
pending state for the candidate, so successive counted occurrences use
strictly later events: the non-overlap rule. Completing at the earliest
feasible event plus a full clear yields the maximum non-overlapped count
(checked exactly against the exhaustive oracle in the test suite).
"""

from __future__ import annotations

import time as _time
from collections import deque

from .episodes import (
    EpisodeCount,
    MiningConfig,
    ParallelEpisode,
    generate_parallel_candidates,
)
from .events import EventSequence
from .serial import MiningLevel, _fan_out, _rank


class _Recognizer:
    __slots__ = ("episode", "needed", "pending", "freq", "occurrences")

    def __init__(self, episode: ParallelEpisode):
        self.episode = episode
        self.needed = dict(episode.multiplicities())
        self.pending = {t: deque() for t in self.needed}
        self.freq = 0
        self.occurrences: list[tuple[int, ...]] = []


def count_parallel_expiry(
    candidates,
    seq: EventSequence,
    cfg: MiningConfig,
    *,
    jobs: int = 1,
) -> list[EpisodeCount]:
    """Count all candidates in one pass; returns counts in input order."""
    if cfg.expiry <= 0:
        raise ValueError("parallel counting needs expiry > 0")
    candidates = list(candidates)
    if not candidates:
        return []
    if jobs > 1 and len(candidates) > 1:
        return _fan_out(_count_parallel_chunk, candidates, seq, cfg, jobs)
    expiry = cfg.expiry
    track = cfg.track_occurrences

    recs = [_Recognizer(ep) for ep in candidates]
    interested: dict[str, list[_Recognizer]] = {}
    for rec in recs:
        for etype in rec.needed:
            interested.setdefault(etype, []).append(rec)

    for idx, ev in enumerate(seq.events):
        watchers = interested.get(ev.etype)
        if not watchers:
            continue
        t = ev.time
        cut = t - expiry
        for rec in watchers:
            pending = rec.pending
            pending[ev.etype].append((t, idx))
            complete = True
            for etype, need in rec.needed.items():
                q = pending[etype]
                while q and q[0][0] < cut:
                    q.popleft()
                if len(q) < need:
                    complete = False
            if complete:
                rec.freq += 1
                if track:
                    chosen = []
                    for etype, need in rec.needed.items():
                        q = pending[etype]
                        for _ in range(need):
                            chosen.append(q.popleft()[1])
                    rec.occurrences.append(tuple(sorted(chosen)))
                for q in pending.values():
                    q.clear()

    return [
        EpisodeCount(rec.episode, rec.freq, tuple(rec.occurrences) if track else None)
        for rec in recs
    ]


def _count_parallel_chunk(args):
    candidates, seq, cfg, _unused = args
    return count_parallel_expiry(candidates, seq, cfg)


def mine_parallel(seq: EventSequence, cfg: MiningConfig, *, jobs: int = 1) -> list[MiningLevel]:
    """Level-wise parallel mining; returns frequent episodes per size."""
    floor = cfg.count_floor(len(seq))
    levels: list[MiningLevel] = []
    candidates = [ParallelEpisode((t,)) for t in sorted(seq.alphabet)]
    size = 1
    while candidates and size <= cfg.max_size:
        t0 = _time.perf_counter()
        counts = count_parallel_expiry(candidates, seq, cfg, jobs=jobs)
        frequent = sorted((c for c in counts if c.freq >= floor), key=_rank)
        levels.append(
            MiningLevel(size, len(candidates), tuple(frequent), _time.perf_counter() - t0)
        )
        if not frequent or size == cfg.max_size:
            break
        seeds = frequent[: cfg.beam_width] if cfg.beam_width else frequent
        candidates = generate_parallel_candidates([c.episode for c in seeds])
        size += 1
    return levels
