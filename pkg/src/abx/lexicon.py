"""Lexical hierarchy: load/validate a hypernym DAG, compute chains, resolve senses.

The hierarchy is a rooted DAG of synsets. Depth of the root is 1 and depth of
any other synset is 1 + the minimum depth among its direct hypernyms, so a
shortest hypernym chain from the root to a synset has length equal to its depth.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Collection, Iterable, Literal, Optional

Role = Literal["subject", "object"]


class HierarchyError(ValueError):
    """Structural problem in an edge list. `offending` holds the synset ids involved."""

    def __init__(self, message: str, offending: Iterable[str] = ()):
        self.offending = tuple(sorted(offending))
        if self.offending:
            message = f"{message}: {', '.join(self.offending)}"
        super().__init__(message)


class UnknownSynsetError(LookupError):
    def __init__(self, synset_id: str):
        super().__init__(f"unknown synset id: {synset_id}")
        self.synset_id = synset_id


@dataclass(frozen=True)
class Synset:
    id: str
    lemma: str
    parents: tuple[str, ...]
    depth: int


class Hierarchy:
    """Immutable hypernym DAG. Safe for concurrent reads once constructed.

    `enumerable` is the set of synset ids usable as abstraction levels; it
    starts as all ids and shrinks under `filter_hierarchy`. Filtered synsets
    stay in the graph so chains remain well defined.
    """

    def __init__(self, synsets: dict[str, Synset], root: str,
                 enumerable: Optional[frozenset[str]] = None):
        self.synsets = synsets
        self.root = root
        self.enumerable = frozenset(synsets) if enumerable is None else enumerable
        self._lemma_index: dict[str, list[str]] = {}
        for sid in sorted(synsets):
            self._lemma_index.setdefault(synsets[sid].lemma, []).append(sid)
        self._chains: dict[str, tuple[str, ...]] | None = None

    def __contains__(self, synset_id: str) -> bool:
        return synset_id in self.synsets

    def __len__(self) -> int:
        return len(self.synsets)

    def depth(self, synset_id: str) -> int:
        if synset_id not in self.synsets:
            raise UnknownSynsetError(synset_id)
        return self.synsets[synset_id].depth

    def lemma(self, synset_id: str) -> str:
        if synset_id not in self.synsets:
            raise UnknownSynsetError(synset_id)
        return self.synsets[synset_id].lemma

    def ids_for_lemma(self, lemma: str) -> list[str]:
        return list(self._lemma_index.get(lemma, []))

    def is_enumerable(self, synset_id: str) -> bool:
        return synset_id in self.enumerable

    def _chain_table(self) -> dict[str, tuple[str, ...]]:
        # Lex-min shortest chains for every synset, built in depth order. A
        # prefix of a lex-min chain is itself the lex-min chain of its node,
        # so the greedy DP below is exact.
        if self._chains is None:
            chains: dict[str, tuple[str, ...]] = {self.root: (self.root,)}
            for sid in sorted(self.synsets, key=lambda s: (self.synsets[s].depth, s)):
                if sid == self.root:
                    continue
                syn = self.synsets[sid]
                best = min(
                    chains[p] + (sid,)
                    for p in syn.parents
                    if self.synsets[p].depth == syn.depth - 1
                )
                chains[sid] = best
            self._chains = chains
        return self._chains


def parse_edge_records(lines: Iterable[str]) -> list[tuple[str, str, tuple[str, ...]]]:
    """Parse edge-list lines into (id, lemma, parents) records.

    Format: `synset_id<TAB>lemma<TAB>comma-separated parent ids`, empty third
    field for the root. `#` lines are comments; blank lines are ignored.
    """
    records = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise HierarchyError(f"line {lineno}: expected 3 tab-separated fields, got {len(parts)}")
        sid, lemma, parents_field = parts
        if not sid:
            raise HierarchyError(f"line {lineno}: empty synset id")
        if not lemma:
            raise HierarchyError(f"line {lineno}: empty lemma for synset", [sid])
        parents = tuple(p for p in parents_field.split(",") if p) if parents_field else ()
        records.append((sid, lemma, parents))
    return records


def build_hierarchy(records: Iterable[tuple[str, str, tuple[str, ...]]]) -> Hierarchy:
    """Validate records and construct a Hierarchy with computed depths.

    Record order never matters: all traversals are over sorted ids.
    """
    records = list(records)
    lemmas: dict[str, str] = {}
    parents: dict[str, tuple[str, ...]] = {}
    dupes = set()
    for sid, lemma, pids in records:
        if sid in lemmas:
            dupes.add(sid)
        lemmas[sid] = lemma
        parents[sid] = tuple(sorted(set(pids)))
    if dupes:
        raise HierarchyError("duplicate synset id", dupes)

    unknown_parents = {p for pids in parents.values() for p in pids if p not in lemmas}
    if unknown_parents:
        raise HierarchyError("parent id not defined", unknown_parents)

    _check_acyclic(parents)

    roots = sorted(sid for sid, pids in parents.items() if not pids)
    if not roots:
        raise HierarchyError("missing root (no synset with empty parents)")
    if len(roots) > 1:
        raise HierarchyError("expected a unique root, found several parentless synsets", roots)
    root = roots[0]

    depths = _bfs_depths(parents, root)
    unreachable = set(parents) - set(depths)
    if unreachable:
        raise HierarchyError("synset cannot reach the root", unreachable)

    synsets = {
        sid: Synset(id=sid, lemma=lemmas[sid], parents=parents[sid], depth=depths[sid])
        for sid in parents
    }
    return Hierarchy(synsets, root)


def load_hierarchy(path) -> Hierarchy:
    with open(path, encoding="utf-8") as fh:
        return build_hierarchy(parse_edge_records(fh))


def _check_acyclic(parents: dict[str, tuple[str, ...]]) -> None:
    # Kahn's algorithm over parent->child edges; leftovers contain a cycle.
    children: dict[str, list[str]] = {sid: [] for sid in parents}
    indegree = {sid: len(pids) for sid, pids in parents.items()}
    for sid, pids in parents.items():
        for p in pids:
            children[p].append(sid)
    queue = deque(sorted(sid for sid, deg in indegree.items() if deg == 0))
    seen = 0
    while queue:
        node = queue.popleft()
        seen += 1
        for child in sorted(children[node]):
            indegree[child] -= 1
            if indegree[child] == 0:
                queue.append(child)
    if seen == len(parents):
        return
    leftover = {sid for sid, deg in indegree.items() if deg > 0}
    raise HierarchyError("cycle detected", _extract_cycle(parents, leftover))


def _extract_cycle(parents: dict[str, tuple[str, ...]], leftover: set[str]) -> set[str]:
    # Every leftover node has a parent in leftover, so walking parents must loop.
    start = min(leftover)
    path: list[str] = []
    seen_at: dict[str, int] = {}
    node = start
    while node not in seen_at:
        seen_at[node] = len(path)
        path.append(node)
        node = min(p for p in parents[node] if p in leftover)
    return set(path[seen_at[node]:])


def _bfs_depths(parents: dict[str, tuple[str, ...]], root: str) -> dict[str, int]:
    children: dict[str, list[str]] = {sid: [] for sid in parents}
    for sid, pids in parents.items():
        for p in pids:
            children[p].append(sid)
    depths = {root: 1}
    queue = deque([root])
    while queue:
        node = queue.popleft()
        for child in sorted(children[node]):
            if child not in depths:
                depths[child] = depths[node] + 1
                queue.append(child)
    return depths


def shortest_chain(h: Hierarchy, synset_id: str) -> tuple[str, ...]:
    """Root-to-synset chain of length depth(synset_id).

    Among equal-length chains the elementwise lexicographically smallest id
    sequence is returned, so the result is implementation independent.
    """
    if synset_id not in h.synsets:
        raise UnknownSynsetError(synset_id)
    return h._chain_table()[synset_id]


def filter_hierarchy(
    h: Hierarchy, min_depth: int, corpus_vocab: Optional[Collection[str]] = None
) -> Hierarchy:
    """Restricted view for abstraction enumeration.

    Synsets shallower than `min_depth` or (when a vocabulary is given) with a
    lemma outside `corpus_vocab` become non-enumerable but are kept in the
    graph, so chains over the view skip them while preserving order.
    """
    if min_depth < 1:
        raise ValueError("min_depth must be >= 1")
    keep = frozenset(
        sid for sid, syn in h.synsets.items()
        if syn.depth >= min_depth
        and (corpus_vocab is None or syn.lemma in corpus_vocab)
    )
    view = Hierarchy(h.synsets, h.root, enumerable=keep & h.enumerable)
    view._chains = h._chains  # chains are over the full graph; share the cache
    return view


def enumerable_chain(h: Hierarchy, synset_id: str) -> tuple[str, ...]:
    """Shortest chain with non-enumerable synsets skipped, order preserved."""
    return tuple(sid for sid in shortest_chain(h, synset_id) if h.is_enumerable(sid))


@dataclass(frozen=True)
class SenseMap:
    """Precomputed word+role -> synset assignments (e.g. exported WSD output)."""

    entries: dict[tuple[str, Role], str] = field(default_factory=dict)

    @staticmethod
    def load(path, h: Hierarchy) -> "SenseMap":
        entries: dict[tuple[str, Role], str] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise ValueError(f"sense map line {lineno}: expected 3 fields")
                word, role, sid = parts
                if role not in ("subject", "object"):
                    raise ValueError(f"sense map line {lineno}: bad role {role!r}")
                if sid not in h:
                    raise UnknownSynsetError(sid)
                entries[(word, role)] = sid
        return SenseMap(entries)


def resolve_sense(sm: SenseMap, h: Hierarchy, word: str, role: Role) -> Optional[str]:
    """Synset for a surface word, or None when the word is not in the hierarchy.

    Falls back to the lexicographically smallest synset whose lemma equals the
    word, which keeps resolution deterministic without a sense model.
    """
    mapped = sm.entries.get((word, role))
    if mapped is not None:
        return mapped
    candidates = h.ids_for_lemma(word)
    if candidates:
        return candidates[0]
    return None
