"""Word-alignment parsing and the average-anticipation score.

An alignment link (i, j) pairs source position i with target position j,
0-indexed. A link with i > j means the target word was produced before its
aligned source word would have been read: anticipation. The per-sentence
score averages max(i - j, 0) over all links, so 0 means the pair is fully
monotonic. Only the difference i - j enters the score, which makes the value
independent of the index base used by the aligner.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyAlignmentError, FormatError


@dataclass(frozen=True)
class Alignment:
    """A set of source→target index links for one sentence pair."""

    links: frozenset[tuple[int, int]]
    source_len: int
    target_len: int

    def __init__(self, links, source_len: int, target_len: int):
        linkset = frozenset((int(i), int(j)) for i, j in links)
        for i, j in linkset:
            if not 0 <= i < source_len:
                raise ValueError(f"link ({i},{j}): source index out of range [0,{source_len})")
            if not 0 <= j < target_len:
                raise ValueError(f"link ({i},{j}): target index out of range [0,{target_len})")
        object.__setattr__(self, "links", linkset)
        object.__setattr__(self, "source_len", int(source_len))
        object.__setattr__(self, "target_len", int(target_len))

    def __len__(self) -> int:
        return len(self.links)


def parse_pharaoh(
    line: str,
    source_len: int,
    target_len: int,
    *,
    source: str | None = None,
    lineno: int | None = None,
) -> Alignment:
    """Parse one Pharaoh-format line (`i-j` pairs, 0-indexed, space separated).

    A blank line yields an empty link set. Duplicate links collapse.
    """
    links: list[tuple[int, int]] = []
    for fieldno, chunk in enumerate(line.split()):
        i_str, sep, j_str = chunk.partition("-")
        if not sep:
            raise FormatError(
                f"field {fieldno}: expected 'i-j', got {chunk!r}", source=source, line=lineno
            )
        try:
            i, j = int(i_str), int(j_str)
        except ValueError:
            raise FormatError(
                f"field {fieldno}: non-integer indexes in {chunk!r}", source=source, line=lineno
            ) from None
        if i < 0 or j < 0:
            raise FormatError(
                f"field {fieldno}: negative index in {chunk!r}", source=source, line=lineno
            )
        links.append((i, j))
    try:
        return Alignment(links, source_len, target_len)
    except ValueError as exc:
        raise FormatError(str(exc), source=source, line=lineno) from exc


def aa(alignment: Alignment) -> float:
    """Average anticipation: mean over links of max(i - j, 0).

    Undefined (raises EmptyAlignmentError) when the alignment has no links;
    treating unalignable pairs as monotonic would silently pollute any corpus
    filtered on this score.
    """
    n = len(alignment.links)
    if n == 0:
        raise EmptyAlignmentError("alignment has no links; average anticipation is undefined")
    total = 0
    for i, j in alignment.links:
        if i > j:
            total += i - j
    return total / n


def is_monotonic(alignment: Alignment) -> bool:
    """True iff no link anticipates, i.e. the score is exactly 0."""
    if len(alignment.links) == 0:
        raise EmptyAlignmentError("alignment has no links; monotonicity is undefined")
    return all(i <= j for i, j in alignment.links)
