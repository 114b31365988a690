"""Text file formats.

Table::

    # comment lines start with '#'
    n q
    v_0 v_1 ... v_{q^n - 1}      (any line breaks; lexicographic argument order)

System: table blocks separated by a line ``---``.

Key file: one table block (stream key) or several (orthogonal system; the
first quasigroup among them doubles as the stream key in mixed mode),
followed by optional ``name: value`` lines::

    leaders: 0 1 2 3
    schedule: 4 5
    rounds: 2
    tquasigroup: 257:2:3:5

Ciphertext::

    QC1 <engine> <n> <q> <msg-len>
    s_1 s_2 ...

``msg-len`` is the plaintext length in symbols. Symbols are integers, or
alphabet tokens when an alphabet file is used. Alphabet file: one line of q
distinct tokens; position = code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .algebra import Alphabet, OperationTable, is_quasigroup
from .cipher import MixSchedule
from .orthogonality import OrthogonalSystem
from .tquasigroup import LinearQuasigroupSpec

MAGIC = "QC1"
ENGINES = ("binary", "nary", "block", "leaderfan", "mixed")
_OPTION_RE = re.compile(r"^([A-Za-z_]+)\s*:\s*(.*)$")


class ParseError(ValueError):
    def __init__(self, line: int | None, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _content_lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield number, line


def _parse_block(lines: Sequence[tuple[int, str]], alphabet: Alphabet | None) -> OperationTable:
    tokens = [(number, tok) for number, line in lines for tok in line.split()]
    if len(tokens) < 2:
        raise ParseError(lines[0][0] if lines else None, "table header 'n q' missing")
    try:
        n, q = int(tokens[0][1]), int(tokens[1][1])
    except ValueError:
        raise ParseError(tokens[0][0], "table header must be two integers 'n q'") from None
    if n < 1 or q < 2:
        raise ParseError(tokens[0][0], f"bad header n={n} q={q}")
    body = tokens[2:]
    size = q ** n
    if len(body) < size:
        last = body[-1][0] if body else tokens[1][0]
        raise ParseError(last, f"expected {size} table values, found {len(body)}")
    if len(body) > size:
        raise ParseError(body[size][0], f"unexpected extra value {body[size][1]!r}")
    values = []
    for number, tok in body:
        try:
            v = int(tok)
        except ValueError:
            raise ParseError(number, f"not an integer: {tok!r}") from None
        if not 0 <= v < q:
            raise ParseError(number, f"value {v} outside 0..{q - 1}")
        values.append(v)
    if alphabet is not None and alphabet.q != q:
        raise ParseError(tokens[1][0], f"alphabet has {alphabet.q} symbols but table has q={q}")
    return OperationTable(n, q, tuple(values), alphabet)


def _split_blocks(text: str):
    blocks: list[list[tuple[int, str]]] = [[]]
    options: list[tuple[int, str, str]] = []
    for number, line in _content_lines(text):
        if line == "---":
            blocks.append([])
            continue
        m = _OPTION_RE.match(line)
        if m:
            options.append((number, m.group(1).lower(), m.group(2).strip()))
        else:
            blocks[-1].append((number, line))
    blocks = [b for b in blocks if b]
    if not blocks:
        raise ParseError(None, "no table found")
    return blocks, options


def parse_table(text: str, alphabet: Alphabet | None = None) -> OperationTable:
    blocks, options = _split_blocks(text)
    if len(blocks) != 1:
        raise ParseError(blocks[1][0][0], "expected a single table")
    return _parse_block(blocks[0], alphabet)


def format_table(table: OperationTable, comment: str | None = None) -> str:
    lines = [f"# {c}" for c in (comment.splitlines() if comment else [])]
    lines.append(f"{table.arity} {table.q}")
    q = table.q
    width = len(str(q - 1))
    for start in range(0, len(table.values), q):
        lines.append(" ".join(str(v).rjust(width) for v in table.values[start:start + q]))
    return "\n".join(lines) + "\n"


def parse_system(text: str, alphabet: Alphabet | None = None) -> list[OperationTable]:
    """All table blocks; orthogonality is not checked here."""
    blocks, _ = _split_blocks(text)
    return [_parse_block(b, alphabet) for b in blocks]


def format_system(tables: Sequence[OperationTable]) -> str:
    return "---\n".join(format_table(t) for t in tables)


def parse_alphabet(text: str) -> Alphabet:
    lines = list(_content_lines(text))
    if len(lines) != 1:
        raise ParseError(lines[1][0] if len(lines) > 1 else None, "alphabet file must hold one line")
    tokens = tuple(lines[0][1].split())
    try:
        return Alphabet(len(tokens), tokens)
    except ValueError as exc:
        raise ParseError(lines[0][0], str(exc)) from None


def read_alphabet(path) -> Alphabet:
    return parse_alphabet(Path(path).read_text())


@dataclass(frozen=True)
class KeyFile:
    tables: tuple[OperationTable, ...]
    leaders: tuple[int, ...] | None = None
    schedule: MixSchedule | None = None
    rounds: int | None = None
    tquasigroup: LinearQuasigroupSpec | None = None

    @property
    def q(self) -> int:
        return self.tables[0].q

    def stream_key(self) -> OperationTable:
        """The key for the stream engines: the single table, else the first quasigroup."""
        if len(self.tables) == 1:
            return self.tables[0]
        for t in self.tables:
            if is_quasigroup(t):
                return t
        raise ValueError("no quasigroup table in this key file")

    def system(self) -> OrthogonalSystem:
        return OrthogonalSystem(self.tables)


def parse_keyfile(text: str, alphabet: Alphabet | None = None) -> KeyFile:
    blocks, options = _split_blocks(text)
    tables = tuple(_parse_block(b, alphabet) for b in blocks)
    fields: dict = {}
    for number, name, value in options:
        try:
            if name == "leaders":
                enc = alphabet or Alphabet(tables[0].q)
                fields["leaders"] = tuple(enc.encode(t) for t in value.split())
            elif name == "schedule":
                fields["schedule"] = MixSchedule.parse(value)
            elif name == "rounds":
                fields["rounds"] = int(value)
                if fields["rounds"] < 1:
                    raise ValueError("rounds must be at least 1")
            elif name == "tquasigroup":
                fields["tquasigroup"] = LinearQuasigroupSpec.parse(value)
            else:
                raise ValueError(f"unknown key option {name!r}")
        except ValueError as exc:
            raise ParseError(number, str(exc)) from None
    return KeyFile(tables, **fields)


def format_keyfile(key: KeyFile, comment: str | None = None) -> str:
    out = "# " + comment + "\n" if comment else ""
    out += format_system(key.tables)
    if key.leaders is not None:
        out += "leaders: " + " ".join(map(str, key.leaders)) + "\n"
    if key.schedule is not None:
        out += "schedule: " + " ".join(map(str, key.schedule.digits)) + "\n"
    if key.rounds is not None:
        out += f"rounds: {key.rounds}\n"
    if key.tquasigroup is not None:
        out += f"tquasigroup: {key.tquasigroup}\n"
    return out


def read_keyfile(path, alphabet: Alphabet | None = None) -> KeyFile:
    return parse_keyfile(Path(path).read_text(), alphabet)


@dataclass(frozen=True)
class CipherFile:
    engine: str
    arity: int
    q: int
    length: int
    symbols: tuple[int, ...]


def format_ciphertext(c: CipherFile, alphabet: Alphabet | None = None) -> str:
    enc = alphabet or Alphabet(c.q)
    body = " ".join(enc.decode(s) for s in c.symbols)
    return f"{MAGIC} {c.engine} {c.arity} {c.q} {c.length}\n{body}\n"


def parse_ciphertext(text: str, alphabet: Alphabet | None = None) -> CipherFile:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError(None, "empty ciphertext file")
    number, header = lines[0]
    parts = header.split()
    if len(parts) != 5 or parts[0] != MAGIC:
        raise ParseError(number, f"header must be '{MAGIC} <engine> <n> <q> <msg-len>'")
    engine = parts[1]
    if engine not in ENGINES:
        raise ParseError(number, f"unknown engine {engine!r}")
    try:
        n, q, length = (int(x) for x in parts[2:])
    except ValueError:
        raise ParseError(number, "n, q and msg-len must be integers") from None
    enc = alphabet or Alphabet(q)
    if enc.q != q:
        raise ParseError(number, f"alphabet has {enc.q} symbols, ciphertext q={q}")
    symbols = []
    for number, line in lines[1:]:
        for tok in line.split():
            try:
                symbols.append(enc.encode(tok))
            except ValueError as exc:
                raise ParseError(number, str(exc)) from None
    return CipherFile(engine, n, q, length, tuple(symbols))
