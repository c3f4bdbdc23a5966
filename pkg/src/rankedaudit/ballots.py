"""Candidate rosters, ranked ballots, and the ballot file format.

A ranking is a plain tuple of candidate indices, ordered by preference and
duplicate-free. Everything past the parse boundary works with indices; names
exist only at the file and API edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

Ranking = tuple[int, ...]


class BallotParseError(ValueError):
    """Raised on malformed roster or ballot input; carries the 1-based line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Roster:
    """The fixed, ordered list of candidates for one election.

    Roster order is significant: it defines candidate indices, deterministic
    tie-breaking, and tree branch order for the life of the election.
    """

    candidates: tuple[str, ...]

    def __post_init__(self):
        names = tuple(name.strip() for name in self.candidates)
        if not names:
            raise ValueError("roster must contain at least one candidate")
        if any(not name for name in names):
            raise ValueError("candidate names must be non-empty")
        if len(set(names)) != len(names):
            raise ValueError("candidate names must be unique after trimming")
        object.__setattr__(self, "candidates", names)

    @property
    def k(self) -> int:
        return len(self.candidates)

    def index_of(self, name: str) -> int:
        try:
            return self.candidates.index(name.strip())
        except ValueError:
            raise KeyError(f"unknown candidate name: {name!r}") from None

    def name_of(self, index: int) -> str:
        return self.candidates[index]


def validate_ranking(ranking: Iterable[int], k: int) -> Ranking:
    """Check index bounds, duplicates and length; returns the tuple form."""
    prefs = tuple(ranking)
    if not prefs:
        raise ValueError("ranking must list at least a first preference")
    if len(prefs) > k:
        raise ValueError(f"ranking lists {len(prefs)} preferences but k={k}")
    seen = set()
    for c in prefs:
        if not (0 <= c < k):
            raise ValueError(f"candidate index {c} out of range for k={k}")
        if c in seen:
            raise ValueError(f"candidate index {c} appears twice")
        seen.add(c)
    return prefs


def canonicalize(ranking: Iterable[int], k: int) -> Ranking:
    """Append the forced last candidate when all but one are ranked.

    A ranking of k-1 candidates determines the last, so its canonical form is
    the complete ranking. Anything shorter (or already complete) is returned
    unchanged. Idempotent.
    """
    prefs = validate_ranking(ranking, k)
    if len(prefs) == k - 1:
        missing = set(range(k)).difference(prefs)
        prefs = prefs + (missing.pop(),)
    return prefs


def is_canonical(ranking: Ranking, k: int) -> bool:
    return len(ranking) != k - 1


@dataclass
class BallotMultiset:
    """A multiset of canonical rankings with positive integer counts."""

    _entries: dict[Ranking, int] = field(default_factory=dict)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Iterable[int], int]], k: int) -> "BallotMultiset":
        ms = cls()
        for ranking, count in pairs:
            ms.add(canonicalize(ranking, k), count)
        return ms

    def add(self, ranking: Ranking, count: int = 1) -> None:
        if count < 0:
            raise ValueError("count must be non-negative")
        if count == 0:
            return
        self._entries[ranking] = self._entries.get(ranking, 0) + count

    def merge(self, other: "BallotMultiset") -> None:
        for ranking, count in other.items():
            self.add(ranking, count)

    def items(self) -> Iterator[tuple[Ranking, int]]:
        return iter(self._entries.items())

    def count_of(self, ranking: Ranking) -> int:
        return self._entries.get(ranking, 0)

    @property
    def total(self) -> int:
        return sum(self._entries.values())

    @property
    def distinct(self) -> int:
        return len(self._entries)

    def copy(self) -> "BallotMultiset":
        return BallotMultiset(dict(self._entries))

    def __eq__(self, other) -> bool:
        return isinstance(other, BallotMultiset) and self._entries == other._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"BallotMultiset({self.distinct} types, {self.total} ballots)"


def parse_roster(text: str) -> Roster:
    """One candidate name per line; order significant; blanks and # comments skipped."""
    names = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line in names:
            raise BallotParseError(f"duplicate candidate name {line!r}", lineno)
        names.append(line)
    if not names:
        raise BallotParseError("roster file lists no candidates")
    return Roster(tuple(names))


def parse_ballot_line(line: str, roster: Roster, lineno: int | None = None,
                      count_required: bool = True) -> tuple[Ranking, int]:
    """Parse one `count,name1,...,nameL` record into a canonical ranking.

    With count_required false (interactive streams), a line whose first field
    is not a positive integer is read as a bare ranking with count 1.
    """
    fields = [f.strip() for f in line.split(",")]
    count_text = fields[0]
    names = fields[1:]
    if count_required:
        if not count_text.isdigit() or int(count_text) <= 0:
            raise BallotParseError(f"count {count_text!r} is not a positive integer", lineno)
        count = int(count_text)
    else:
        if count_text.isdigit() and int(count_text) > 0:
            count = int(count_text)
        else:
            count = 1
            names = fields
    if not names or names == [""]:
        raise BallotParseError("empty preference list", lineno)
    prefs = []
    for name in names:
        try:
            idx = roster.index_of(name)
        except KeyError:
            raise BallotParseError(f"unknown candidate name {name!r}", lineno) from None
        if idx in prefs:
            raise BallotParseError(f"duplicate candidate {name!r} in ranking", lineno)
        prefs.append(idx)
    return canonicalize(prefs, roster.k), count


def parse_ballots(text: str, roster: Roster) -> BallotMultiset:
    """Parse a ballot file into an aggregated, canonicalized multiset.

    Format: one `count,name1,...,nameL` record per line; `#` comments and
    blank lines ignored; duplicate rankings merged by summing counts.
    """
    ms = BallotMultiset()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        ranking, count = parse_ballot_line(line, roster, lineno)
        ms.add(ranking, count)
    return ms


def serialize_ballots(ballots: BallotMultiset, roster: Roster) -> str:
    """Render a multiset in the ballot file format, entries sorted by ranking."""
    lines = []
    for ranking in sorted(dict(ballots.items())):
        names = ",".join(roster.name_of(c) for c in ranking)
        lines.append(f"{ballots.count_of(ranking)},{names}")
    return "\n".join(lines) + ("\n" if lines else "")
