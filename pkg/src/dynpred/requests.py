"""Requests, request sequences and their line encoding."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

UPDATE = "U"
QUERY = "Q"

Payload = tuple


@dataclass(frozen=True, order=True)
class Request:
    """An update or query event.

    ``payload`` is a tuple whose first element is a problem tag such as
    ``"edge"`` or ``"query"`` and whose remaining elements are integers.
    Ordering is by kind, then payload, which makes multisets deterministic.
    """

    kind: str
    payload: Payload

    def __post_init__(self) -> None:
        if self.kind not in (UPDATE, QUERY):
            raise ValueError(f"unknown request kind {self.kind!r}")
        if not self.payload or not isinstance(self.payload[0], str):
            raise ValueError("payload must start with a tag")

    @property
    def is_update(self) -> bool:
        return self.kind == UPDATE

    @property
    def is_query(self) -> bool:
        return self.kind == QUERY

    @property
    def tag(self) -> str:
        return self.payload[0]

    @property
    def args(self) -> tuple:
        return self.payload[1:]

    def __str__(self) -> str:
        return format_request(self)


def update(tag: str, *args: int) -> Request:
    return Request(UPDATE, (tag, *args))


def query(tag: str = "query", *args: int) -> Request:
    return Request(QUERY, (tag, *args))


def format_request(r: Request) -> str:
    return " ".join([r.kind, *(str(x) for x in r.payload)])


def parse_request(line: str) -> Request:
    parts = line.split()
    if len(parts) < 2:
        raise ValueError(f"malformed request line {line!r}")
    kind, tag, *rest = parts
    try:
        args = tuple(int(x) for x in rest)
    except ValueError as exc:
        raise ValueError(f"non-integer argument in {line!r}") from exc
    return Request(kind, (tag, *args))


class RequestSequence(Sequence[Request]):
    """Immutable request sequence with 1-based indexing.

    ``seq[t]`` is the t-th request for ``1 <= t <= len(seq)``.
    """

    __slots__ = ("_items",)

    def __init__(self, items: Iterable[Request] = ()) -> None:
        self._items = tuple(items)

    def __len__(self) -> int:
        return len(self._items)

    def __getitem__(self, t):  # type: ignore[override]
        if isinstance(t, slice):
            raise TypeError("use window(a, b) or prefix(t) instead of slicing")
        if not 1 <= t <= len(self._items):
            raise IndexError(f"position {t} outside [1, {len(self._items)}]")
        return self._items[t - 1]

    def __iter__(self) -> Iterator[Request]:
        return iter(self._items)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RequestSequence):
            return self._items == other._items
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._items)

    def __repr__(self) -> str:
        return f"RequestSequence({list(self._items)!r})"

    @property
    def items(self) -> tuple[Request, ...]:
        return self._items

    def prefix(self, t: int) -> "RequestSequence":
        """Requests 1..t (clipped to the sequence)."""
        return RequestSequence(self._items[: max(0, t)])

    def window(self, a: int, b: int) -> "RequestSequence":
        """Requests a..b inclusive, clipped to [1, T]."""
        a = max(1, a)
        b = min(len(self._items), b)
        return RequestSequence(self._items[a - 1 : b] if a <= b else ())

    def __add__(self, other: "RequestSequence") -> "RequestSequence":
        return RequestSequence(self._items + tuple(other))

    def dumps(self) -> str:
        return "".join(format_request(r) + "\n" for r in self._items)

    @classmethod
    def loads(cls, text: str) -> "RequestSequence":
        return cls(parse_request(ln) for ln in text.splitlines() if ln.strip())
