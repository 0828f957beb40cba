import pytest

from spikemine import Event, EventSequence, Interval, SerialEpisode


@pytest.fixture
def worked_sequence() -> EventSequence:
    """The 8-event stream used by the step-by-step counting walkthrough."""
    raw = [("A", 1), ("A", 2), ("B", 4), ("A", 5), ("C", 10), ("B", 12), ("C", 13), ("D", 17)]
    return EventSequence([Event(t, k) for t, k in raw])


@pytest.fixture
def worked_episode() -> SerialEpisode:
    return SerialEpisode(
        ("A", "B", "C", "D"),
        (Interval(0, 5), Interval(5, 10), Interval(0, 5)),
    )
