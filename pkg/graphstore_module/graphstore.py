from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple
import logging

import numpy as np

from constants_module.constants import NEGATIVE, POSITIVE


logger = logging.getLogger(__name__)

COMMENT_PREFIXES = ("%", "#")
DELIMITERS = {"comma": ",", "tab": "\t", "space": None, "whitespace": None, ",": ",", "\t": "\t", " ": None}

RawRecord = Tuple[int, int, float]
RawEdgeList = List[RawRecord]


class EdgeListFormatError(ValueError):
    def __init__(self, path: str, line_number: int, line: str, reason: str):
        self.path = path
        self.line_number = line_number
        self.line = line
        super().__init__(f"{path}:{line_number}: {reason}: {line.strip()!r}")


@dataclass(frozen=True, eq=False)
class SignedGraph:
    """Undirected signed graph with dense node ids 0..n-1.

    `edges` is an (m, 3) int64 array of (u, v, sign) rows with u < v, sorted by (u, v).
    """

    n: int
    edges: np.ndarray
    pos_adj: Tuple[Tuple[int, ...], ...] = field(repr=False)
    neg_adj: Tuple[Tuple[int, ...], ...] = field(repr=False)

    def __post_init__(self) -> None:
        self.edges.setflags(write=False)
        _check_graph(self)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "SignedGraph":
        first: Dict[Tuple[int, int], int] = {}
        for u, v, s in edges:
            first.setdefault((min(int(u), int(v)), max(int(u), int(v))), int(s))
        rows = sorted(first.items())
        arr = np.array([(u, v, s) for (u, v), s in rows], dtype=np.int64).reshape(-1, 3)
        pos: List[List[int]] = [[] for _ in range(n)]
        neg: List[List[int]] = [[] for _ in range(n)]
        for u, v, s in arr:
            target = pos if s > 0 else neg
            target[u].append(int(v))
            target[v].append(int(u))
        return cls(
            n=int(n),
            edges=arr,
            pos_adj=tuple(tuple(sorted(nb)) for nb in pos),
            neg_adj=tuple(tuple(sorted(nb)) for nb in neg),
        )

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def pos_edges(self) -> np.ndarray:
        return self.edges[self.edges[:, 2] > 0, :2]

    @cached_property
    def neg_edges(self) -> np.ndarray:
        return self.edges[self.edges[:, 2] < 0, :2]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(p) + len(q) for p, q in zip(self.pos_adj, self.neg_adj)], dtype=np.int64)

    @cached_property
    def neighbor_sets(self) -> Tuple[frozenset, ...]:
        return tuple(frozenset(p) | frozenset(q) for p, q in zip(self.pos_adj, self.neg_adj))

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_sets[u]

    def signed_adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=np.float64)
        if self.num_edges:
            u, v, s = self.edges[:, 0], self.edges[:, 1], self.edges[:, 2].astype(np.float64)
            adj[u, v] = s
            adj[v, u] = s
        return adj

    def same_as(self, other: "SignedGraph") -> bool:
        return self.n == other.n and np.array_equal(self.edges, other.edges)


@dataclass(frozen=True)
class EdgeSplit:
    train_edges: np.ndarray
    test_edges: np.ndarray
    seed: int


def _check_graph(g: SignedGraph) -> None:
    e = g.edges
    if e.size:
        if e[:, :2].min() < 0 or e[:, :2].max() >= g.n:
            raise ValueError(f"Edge endpoint outside 0..{g.n - 1}")
        if np.any(e[:, 0] >= e[:, 1]):
            raise ValueError("Edges must satisfy u < v (no self-loops)")
        if len({(int(u), int(v)) for u, v in e[:, :2]}) != e.shape[0]:
            raise ValueError("Duplicate edge pair")
        if not np.all(np.isin(e[:, 2], (POSITIVE, NEGATIVE))):
            raise ValueError("Edge signs must be +1 or -1")
    if len(g.pos_adj) != g.n or len(g.neg_adj) != g.n:
        raise ValueError("Adjacency lists must cover every node")
    for i, (p, q) in enumerate(zip(g.pos_adj, g.neg_adj)):
        if set(p) & set(q):
            raise ValueError(f"Node {i} has a neighbor with both signs")


def _resolve_delimiter(delimiter: str | None, sample: str) -> str | None:
    if delimiter is None:
        return None
    if delimiter != "auto":
        return DELIMITERS.get(delimiter, delimiter)
    if "," in sample:
        return ","
    if "\t" in sample:
        return "\t"
    return None


def load_edge_list(path: str | Path, delimiter: str | None = "auto", skip_header: bool = False) -> RawEdgeList:
    """Read (src, dst, weight) records in file order.

    Lines starting with '%' or '#' are comments. Columns past the third (timestamps) are ignored.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise OSError(f"Cannot read edge list {path}: {exc}") from exc

    records: RawEdgeList = []
    sep: str | None = None
    resolved = False
    header_pending = skip_header
    for line_number, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(COMMENT_PREFIXES):
            continue
        if header_pending:
            header_pending = False
            continue
        if not resolved:
            sep = _resolve_delimiter(delimiter, stripped)
            resolved = True
        parts = [p.strip() for p in (stripped.split(sep) if sep else stripped.split())]
        if len(parts) < 3:
            raise EdgeListFormatError(str(path), line_number, line, "expected src, dst, weight")
        try:
            records.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise EdgeListFormatError(str(path), line_number, line, "non-numeric field") from exc

    logger.info("edge_list_loaded path=%s records=%s", path, len(records))
    return records


def write_edge_list(records: Iterable[Sequence[float]], path: str | Path, delimiter: str = ",") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sep = DELIMITERS.get(delimiter, delimiter) or " "
    with path.open("w", encoding="utf-8") as fh:
        for u, v, w in records:
            weight = int(w) if float(w).is_integer() else float(w)
            fh.write(f"{int(u)}{sep}{int(v)}{sep}{weight}\n")
    return path


def preprocess(raw: Sequence[RawRecord]) -> SignedGraph:
    """Drop self-loops, keep the first record of each unordered pair, map weight >= 0 to +1."""
    seen = set()
    kept: List[Tuple[int, int, int]] = []
    dropped_loops = 0
    for u, v, w in raw:
        if u == v:
            dropped_loops += 1
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            continue
        seen.add(key)
        kept.append((key[0], key[1], NEGATIVE if w < 0 else POSITIVE))

    ids = sorted({u for u, _, _ in kept} | {v for _, v, _ in kept})
    index = {node: i for i, node in enumerate(ids)}
    graph = SignedGraph.from_edges(len(ids), [(index[u], index[v], s) for u, v, s in kept])
    logger.info(
        "graph_preprocessed records=%s nodes=%s edges=%s self_loops=%s duplicates=%s",
        len(raw), graph.n, graph.num_edges, dropped_loops, len(raw) - dropped_loops - len(kept),
    )
    return graph


def encode(g: SignedGraph) -> RawEdgeList:
    return [(int(u), int(v), float(s)) for u, v, s in g.edges]


def subgraph(g: SignedGraph, edges: np.ndarray) -> SignedGraph:
    """Same node set as `g`, restricted to `edges`."""
    return SignedGraph.from_edges(g.n, np.asarray(edges).reshape(-1, 3))


def _test_count(frac: float, size: int) -> int:
    return int(np.floor(frac * size + 0.5))


def split_edges(g: SignedGraph, test_frac: float = 0.2, seed: int = 42) -> EdgeSplit:
    """Stratified split: `test_frac` of each sign class goes to the test side."""
    if not 0.0 < test_frac < 1.0:
        raise ValueError(f"test_frac must be in (0, 1), got {test_frac}")
    rng = np.random.default_rng(seed)
    train_parts: List[np.ndarray] = []
    test_parts: List[np.ndarray] = []
    for sign, name in ((POSITIVE, "positive"), (NEGATIVE, "negative")):
        cls = g.edges[g.edges[:, 2] == sign]
        if cls.shape[0] == 0:
            raise ValueError(f"Cannot stratify: the {name} edge class is empty")
        order = rng.permutation(cls.shape[0])
        n_test = _test_count(test_frac, cls.shape[0])
        test_parts.append(cls[order[:n_test]])
        train_parts.append(cls[order[n_test:]])
    return EdgeSplit(
        train_edges=np.concatenate(train_parts, axis=0),
        test_edges=np.concatenate(test_parts, axis=0),
        seed=seed,
    )
