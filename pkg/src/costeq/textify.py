"""Text-to-text serialization of task examples and knowledge-graph triples.

Serialized inputs look like::

    [socialiqa]:
    <question>Q?</question>
    <answerA>x</answerA>

Feature values are escaped so that each feature stays on one line and never
contains a raw angle bracket: ``\\`` becomes ``\\\\``, a newline becomes
``\\n`` and ``<``/``>`` become ``\\<``/``\\>``. Targets are passed through
untouched.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import ParseError, ValidationError

_TASK_RE = re.compile(r"[a-z0-9][a-z0-9_.\-]*\Z")
_TAG_BAD = re.compile(r"[\s<>]")

_ESCAPES = {"\\": "\\\\", "\n": "\\n", "<": "\\<", ">": "\\>"}
_UNESCAPES = {"\\": "\\", "n": "\n", "<": "<", ">": ">"}


class Direction(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    BIDIRECTIONAL = "bidirectional"


GRAPHS = ("atomic", "conceptnet")


def _check_task(task: str) -> None:
    if not isinstance(task, str) or not _TASK_RE.match(task):
        raise ValidationError(f"task must be a lowercase identifier, got {task!r}")


def _check_tag(tag: str) -> None:
    if not isinstance(tag, str) or not tag:
        raise ValidationError("feature tags must be non-empty strings")
    if _TAG_BAD.search(tag):
        raise ValidationError(f"feature tag {tag!r} contains whitespace or an angle bracket")


@dataclass(frozen=True)
class TaskExample:
    task: str
    features: tuple[tuple[str, str], ...]
    target: str

    def __post_init__(self) -> None:
        _check_task(self.task)
        features = tuple((tag, value) for tag, value in self.features)
        object.__setattr__(self, "features", features)
        if not features:
            raise ValidationError("an example needs at least one feature")
        seen = set()
        for tag, value in features:
            _check_tag(tag)
            if tag in seen:
                raise ValidationError(f"duplicate feature tag {tag!r}")
            seen.add(tag)
            if not isinstance(value, str):
                raise ValidationError(f"feature {tag!r} value must be a string")
        if not isinstance(self.target, str):
            raise ValidationError("target must be a string")


@dataclass(frozen=True)
class KgTriple:
    graph: str
    subject: str
    relation: str
    object: str

    def __post_init__(self) -> None:
        if self.graph not in GRAPHS:
            raise ValidationError(f"graph must be one of {GRAPHS}, got {self.graph!r}")
        for name in ("subject", "relation", "object"):
            if not getattr(self, name):
                raise ValidationError(f"triple {name} is empty")


def escape(value: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in value)


def unescape(value: str, base: int = 0, text: str | None = None) -> str:
    """Reverse :func:`escape`; ``base``/``text`` locate errors as byte offsets."""
    out = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch == "\\":
            nxt = value[i + 1] if i + 1 < len(value) else ""
            if not nxt or nxt not in _UNESCAPES:
                seq = "\\" + nxt
                raise ParseError(f"invalid escape sequence {seq!r}", offset=_byte_offset(text, base + i))
            out.append(_UNESCAPES[nxt])
            i += 2
        elif ch in "<>":
            raise ParseError(f"unescaped {ch!r} inside a feature value", offset=_byte_offset(text, base + i))
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _byte_offset(text: str | None, index: int) -> int:
    if text is None:
        return index
    return len(text[:index].encode("utf-8"))


def serialize_example(example: TaskExample) -> tuple[str, str]:
    lines = [f"[{example.task}]:"]
    lines.extend(f"<{tag}>{escape(value)}</{tag}>" for tag, value in example.features)
    return "\n".join(lines), example.target


def parse_example(input: str, target: str) -> TaskExample:
    """Inverse of :func:`serialize_example`."""
    newline = input.find("\n")
    if newline < 0:
        raise ParseError("missing newline after task prefix", offset=_byte_offset(input, len(input)))
    prefix = input[:newline]
    if not (prefix.startswith("[") and prefix.endswith("]:")):
        raise ParseError(f"malformed task prefix {prefix!r}", offset=0)
    task = prefix[1:-2]
    if not _TASK_RE.match(task):
        raise ParseError(f"malformed task name {task!r}", offset=1)

    features = []
    seen = set()
    pos = newline + 1
    for line in input[pos:].split("\n"):
        start = pos
        pos += len(line) + 1
        if not line.startswith("<"):
            raise ParseError("expected an opening tag", offset=_byte_offset(input, start))
        close = line.find(">")
        if close < 0:
            raise ParseError("unterminated opening tag", offset=_byte_offset(input, start))
        tag = line[1:close]
        if not tag or _TAG_BAD.search(tag):
            raise ParseError(f"invalid tag {tag!r}", offset=_byte_offset(input, start + 1))
        end_tag = f"</{tag}>"
        if not line.endswith(end_tag) or len(line) < close + 1 + len(end_tag):
            last_open = line.rfind("</")
            where = start + (last_open if last_open > close else len(line))
            raise ParseError(f"missing or mismatched closing tag for <{tag}>", offset=_byte_offset(input, where))
        if tag in seen:
            raise ParseError(f"duplicate tag <{tag}>", offset=_byte_offset(input, start))
        seen.add(tag)
        body = line[close + 1 : len(line) - len(end_tag)]
        features.append((tag, unescape(body, start + close + 1, input)))
    return TaskExample(task, tuple(features), target)


def serialize_kg_triple(triple: KgTriple, direction: Direction | str) -> list[tuple[str, str]]:
    """Render a triple as completion pairs.

    Forward asks for the object given subject and relation; backward asks
    for the subject given object and relation; bidirectional emits both,
    forward first.
    """
    try:
        direction = Direction(direction)
    except ValueError:
        raise ValidationError(f"direction must be forward, backward or bidirectional, got {direction!r}") from None
    pairs = []
    if direction in (Direction.FORWARD, Direction.BIDIRECTIONAL):
        fwd = TaskExample(triple.graph, (("subject", triple.subject), ("relation", triple.relation)), triple.object)
        pairs.append(serialize_example(fwd))
    if direction in (Direction.BACKWARD, Direction.BIDIRECTIONAL):
        bwd = TaskExample(triple.graph, (("object", triple.object), ("relation", triple.relation)), triple.subject)
        pairs.append(serialize_example(bwd))
    return pairs


# stream formats

_TSV_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_TSV_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def tsv_escape(text: str) -> str:
    return "".join(_TSV_ESCAPES.get(ch, ch) for ch in text)


def tsv_unescape(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            nxt = text[i + 1] if i + 1 < len(text) else ""
            if not nxt or nxt not in _TSV_UNESCAPES:
                seq = "\\" + nxt
                raise ParseError(f"invalid TSV escape {seq!r}", offset=_byte_offset(text, i))
            out.append(_TSV_UNESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def to_tsv_line(pair: tuple[str, str]) -> str:
    """One ``input<TAB>target`` line; backslash, tab, CR and LF are escaped."""
    return f"{tsv_escape(pair[0])}\t{tsv_escape(pair[1])}"


def from_tsv_line(line: str) -> tuple[str, str]:
    line = line.rstrip("\n")
    parts = line.split("\t")
    if len(parts) != 2:
        raise ParseError(f"expected 2 tab-separated fields, got {len(parts)}", offset=0)
    return tsv_unescape(parts[0]), tsv_unescape(parts[1])


def to_jsonl_line(pair: tuple[str, str]) -> str:
    return json.dumps({"input": pair[0], "target": pair[1]}, ensure_ascii=False)


def from_jsonl_line(line: str) -> tuple[str, str]:
    try:
        doc = json.loads(line)
        return doc["input"], doc["target"]
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", offset=exc.pos) from None
    except (KeyError, TypeError):
        raise ParseError("JSON line needs 'input' and 'target' fields", offset=0) from None


def write_pairs(pairs: Iterable[tuple[str, str]], fmt: str = "tsv") -> Iterator[str]:
    if fmt not in ("tsv", "jsonl"):
        raise ValidationError(f"unknown stream format {fmt!r}")
    render = to_tsv_line if fmt == "tsv" else to_jsonl_line
    for pair in pairs:
        yield render(pair)


def example_from_json(doc: dict) -> TaskExample:
    """Build an example from ``{"task", "features", "target"}``.

    ``features`` may be a list of ``[tag, value]`` pairs or an object; an
    object keeps its key order.
    """
    try:
        feats = doc["features"]
        if isinstance(feats, dict):
            feats = list(feats.items())
        return TaskExample(doc["task"], tuple((t, v) for t, v in feats), doc["target"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed example record: {exc}") from None


def triple_from_fields(fields: Sequence[str]) -> KgTriple:
    if len(fields) != 4:
        raise ValidationError(f"a triple needs graph, subject, relation, object; got {len(fields)} fields")
    return KgTriple(*fields)
