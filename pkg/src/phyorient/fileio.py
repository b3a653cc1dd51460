"""Line-based network files.

Undirected::

    # comment
    leaf <id> <label>
    edge <id> <id>

Directed::

    root <id>
    leaf <id> <label>
    arc <from> <to>

Records are written sorted lexicographically, after any header comments.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Union

from phyorient.netmodel import (
    DirectedNetwork,
    UndirectedNetwork,
    norm_edge,
    validate_undirected,
)

PathLike = Union[str, Path]


class ParseError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def _records(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def parse_network(text: str) -> UndirectedNetwork:
    labels: dict[str, str] = {}
    edges: list[tuple[str, str]] = []
    seen: dict[tuple[str, str], int] = {}
    where: dict[str, int] = {}
    for no, parts in _records(text):
        kind = parts[0]
        if kind == "leaf":
            if len(parts) != 3:
                raise ParseError("expected 'leaf <id> <label>'", no)
            _, v, lab = parts
            if v in labels:
                raise ParseError(f"leaf {v} declared twice", no)
            labels[v] = lab
            where.setdefault(v, no)
        elif kind == "edge":
            if len(parts) != 3:
                raise ParseError("expected 'edge <id> <id>'", no)
            _, u, v = parts
            if u == v:
                raise ParseError(f"loop at {u}", no)
            e = norm_edge(u, v)
            if e in seen:
                raise ParseError(f"duplicate edge {u}-{v} (first on line {seen[e]})", no)
            seen[e] = no
            edges.append(e)
            where.setdefault(u, no)
            where.setdefault(v, no)
        else:
            raise ParseError(f"unknown record {kind!r}", no)
    report = validate_undirected(edges, labels)
    if not report.ok:
        # point at the first line mentioning an offending vertex when possible
        first = report.violations[0]
        line = next((where[v] for v in sorted(where, key=where.get) if f" {v} " in f" {first} "), None)
        raise ParseError("; ".join(report.violations), line)
    return UndirectedNetwork.build(edges, labels, validate=False)


def parse_directed(text: str) -> DirectedNetwork:
    root = None
    labels: dict[str, str] = {}
    arcs: list[tuple[str, str]] = []
    for no, parts in _records(text):
        kind = parts[0]
        if kind == "root" and len(parts) == 2:
            if root is not None:
                raise ParseError("second root record", no)
            root = parts[1]
        elif kind == "leaf" and len(parts) == 3:
            labels[parts[1]] = parts[2]
        elif kind == "arc" and len(parts) == 3:
            arcs.append((parts[1], parts[2]))
        else:
            raise ParseError(f"malformed record {' '.join(parts)!r}", no)
    if root is None:
        raise ParseError("missing root record")
    return DirectedNetwork.build(arcs, root, labels)


def _header(comments: Iterable[str]) -> list[str]:
    return [f"# {c}" for c in comments]


def format_network(n: UndirectedNetwork, comments: Iterable[str] = ()) -> str:
    body = [f"leaf {v} {lab}" for v, lab in n.labels]
    body += [f"edge {u} {v}" for u, v in n.edges]
    return "\n".join(_header(comments) + sorted(body)) + "\n"


def format_directed(d: DirectedNetwork, comments: Iterable[str] = ()) -> str:
    body = [f"root {d.root}"]
    body += [f"leaf {v} {lab}" for v, lab in d.labels]
    body += [f"arc {u} {v}" for u, v in d.arcs]
    return "\n".join(_header(comments) + sorted(body)) + "\n"


def read_network(path: PathLike) -> UndirectedNetwork:
    return parse_network(Path(path).read_text(encoding="utf-8"))


def write_network_file(path: PathLike, n: UndirectedNetwork, comments: Iterable[str] = ()) -> None:
    Path(path).write_text(format_network(n, comments), encoding="utf-8")


def write_directed_file(path: PathLike, d: DirectedNetwork, comments: Iterable[str] = ()) -> None:
    Path(path).write_text(format_directed(d, comments), encoding="utf-8")


def to_extended_newick(d: DirectedNetwork) -> str:
    """Best-effort extended Newick: each reticulation becomes ``#H<k>``.

    The subtree below a reticulation is written where a depth-first walk
    over sorted children first reaches it; the other parent gets a bare
    ``#H<k>`` reference.
    """
    rets = sorted(d.reticulations)
    tag = {v: f"#H{i}" for i, v in enumerate(rets, 1)}
    labels = d.label_map
    expanded: set[str] = set()

    def write(v: str) -> str:
        name = labels.get(v, "")
        if v in tag:
            if v in expanded:
                return name + tag[v]
            expanded.add(v)
            name += tag[v]
        kids = d.children[v]
        if not kids:
            return name
        return "(" + ",".join(write(c) for c in sorted(kids)) + ")" + name

    return write(d.root) + ";"

