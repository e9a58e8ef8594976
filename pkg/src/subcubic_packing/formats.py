"""graph6 and DIMACS edge-format readers and writers.

Both writers keep the vertex order of the input graph (no canonical
relabelling), so label tables stay aligned with exported files.
"""

from __future__ import annotations

from pathlib import Path

from .graph import Graph, GraphError, build_graph

GRAPH6_HEADER = ">>graph6<<"
GRAPH6_MAX_N = 68719476735


class GraphFormatError(GraphError):
    """Malformed graph text. ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (offset {offset})")
        self.offset = offset


class MalformedHeaderError(GraphFormatError):
    pass


class IllegalCharacterError(GraphFormatError):
    pass


class TrailingDataError(GraphFormatError):
    pass


class BitLengthError(GraphFormatError):
    pass


def _size_field(n: int) -> list[int]:
    if n < 0 or n > GRAPH6_MAX_N:
        raise GraphFormatError(f"graph6 cannot encode n={n}")
    if n <= 62:
        return [n + 63]
    if n <= 258047:
        return [126] + [(n >> s & 63) + 63 for s in (12, 6, 0)]
    return [126, 126] + [(n >> s & 63) + 63 for s in (30, 24, 18, 12, 6, 0)]


def encode_graph6(g: Graph) -> str:
    """graph6 line (no header, no newline): upper triangle, column by column, 6 bits per byte."""
    out = _size_field(g.n)
    acc = 0
    nbits = 0
    for j in range(1, g.n):
        row = g.adjacency[j]
        for i in range(j):
            acc = (acc << 1) | (i in row)
            nbits += 1
            if nbits == 6:
                out.append(acc + 63)
                acc = nbits = 0
    if nbits:
        out.append((acc << (6 - nbits)) + 63)
    return bytes(out).decode("ascii")


def decode_graph6(line: str) -> Graph:
    text = line.rstrip("\r\n")
    base = 0
    if text.startswith(GRAPH6_HEADER):
        base = len(GRAPH6_HEADER)
    data = text[base:].encode("ascii", errors="replace")
    if not data:
        raise MalformedHeaderError("empty graph6 line", base)
    for pos, ch in enumerate(data):
        if not 63 <= ch <= 126:
            raise IllegalCharacterError(f"byte {ch!r} is outside the graph6 range 63..126", base + pos)

    if data[0] != 126:
        n, pos = data[0] - 63, 1
    elif len(data) >= 2 and data[1] == 126:
        if len(data) < 8:
            raise MalformedHeaderError("truncated 8-byte size field", base + len(data))
        n, pos = _decode_size(data[2:8]), 8
    else:
        if len(data) < 4:
            raise MalformedHeaderError("truncated 4-byte size field", base + len(data))
        n, pos = _decode_size(data[1:4]), 4
        if n <= 62:
            raise MalformedHeaderError(f"n={n} must use the short size field", base)

    need_bits = n * (n - 1) // 2
    need_bytes = (need_bits + 5) // 6
    body = data[pos:]
    if len(body) < need_bytes:
        raise BitLengthError(
            f"expected {need_bytes} adjacency bytes for n={n}, found {len(body)}", base + len(data)
        )
    if len(body) > need_bytes:
        raise TrailingDataError("data after the adjacency bytes", base + pos + need_bytes)

    edges = []
    bit = 0
    i, j = 0, 1
    for k, ch in enumerate(body):
        val = ch - 63
        for s in range(5, -1, -1):
            if bit >= need_bits:
                if val >> s & 1:
                    raise BitLengthError("padding bits must be zero", base + pos + k)
                continue
            if val >> s & 1:
                edges.append((i, j))
            bit += 1
            i += 1
            if i == j:
                i, j = 0, j + 1
    return build_graph(n, edges)


def _decode_size(chunk: bytes) -> int:
    n = 0
    for ch in chunk:
        n = (n << 6) | (ch - 63)
    return n


def write_dimacs(g: Graph, comments: list[str] | None = None) -> str:
    lines = [f"c {c}" for c in comments or []]
    lines.append(f"p edge {g.n} {g.m}")
    lines.extend(f"e {u + 1} {v + 1}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> Graph:
    """Read ``p edge n m`` plus ``e u v`` lines (1-based); ``c`` lines are comments."""
    n = m = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            if n is not None or len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise GraphFormatError(f"line {lineno}: bad problem line {raw!r}")
            n, m = _ints(parts[2:], lineno)
        elif parts[0] == "e":
            if n is None:
                raise GraphFormatError(f"line {lineno}: edge before the problem line")
            if len(parts) != 3:
                raise GraphFormatError(f"line {lineno}: bad edge line {raw!r}")
            u, v = _ints(parts[1:], lineno)
            edges.append((u - 1, v - 1))
        else:
            raise GraphFormatError(f"line {lineno}: unknown line type {parts[0]!r}")
    if n is None:
        raise GraphFormatError("missing problem line")
    if len(edges) != m:
        raise GraphFormatError(f"problem line promises {m} edges, found {len(edges)}")
    return build_graph(n, edges)


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise GraphFormatError(f"line {lineno}: expected integers, got {' '.join(tokens)!r}") from None


def read_graph_file(path: str | Path) -> Graph:
    """Load a graph from ``.g6``/``.graph6``, ``.dimacs``/``.col`` or a JSON graph document."""
    path = Path(path)
    text = path.read_text()
    suffix = path.suffix.lower()
    if suffix in (".g6", ".graph6"):
        return decode_graph6(_first_line(text))
    if suffix in (".dimacs", ".col", ".clq"):
        return parse_dimacs(text)
    if suffix == ".json":
        from .report import graph_from_json

        return graph_from_json(text)
    # sniff: DIMACS files start with c/p lines, graph6 is one token
    stripped = text.lstrip()
    if stripped.startswith(("c ", "p ", "c\n")):
        return parse_dimacs(text)
    return decode_graph6(_first_line(stripped))


def _first_line(text: str) -> str:
    lines = text.strip().splitlines()
    return lines[0] if lines else ""
