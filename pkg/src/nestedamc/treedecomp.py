"""Tree decompositions of primal graphs, separator approximation, and the
rooted, separator-first decompositions that yield compilation variable orders.

Decomposition uses min-fill elimination with seeded random tie-breaking and a
configurable number of restarts, keeping the smallest width found. Separators
are exact vertex min-cuts computed by node-splitting max-flow as long as the
flow stays under a bound, with the frontier of the allowed set as fallback.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from .cnf import LabeledCnf, primal_graph
from .errors import PreconditionError

DEFAULT_RESTARTS = 8
DEFAULT_FLOW_BOUND = 64


@dataclass
class TreeDecomposition:
    """A tree of bags over graph vertices with a designated root."""

    bags: dict[int, frozenset[int]]
    tree: nx.Graph
    root: int

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=1) - 1

    def children(self, node: int, parent: int | None = None):
        return sorted(n for n in self.tree.neighbors(node) if n != parent)


@dataclass(frozen=True)
class VariableOrder:
    """A permutation of the variables; the prefix up to `boundary_index` is
    the separator block that must be decided first."""

    sequence: tuple[int, ...]
    boundary_index: int = 0

    def position(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.sequence)}


def _min_fill_order(g: nx.Graph, rng: random.Random):
    """One min-fill elimination run; returns [(vertex, neighbours at elimination)]."""
    adj = {v: set(g.neighbors(v)) for v in g.nodes}
    out = []
    while adj:
        best_cost = None
        candidates = []
        for v in sorted(adj):
            nbrs = adj[v]
            cost = 0
            ns = sorted(nbrs)
            for i, u in enumerate(ns):
                au = adj[u]
                for w in ns[i + 1 :]:
                    if w not in au:
                        cost += 1
            if best_cost is None or cost < best_cost:
                best_cost = cost
                candidates = [v]
            elif cost == best_cost:
                candidates.append(v)
        v = candidates[rng.randrange(len(candidates))]
        nbrs = sorted(adj[v])
        out.append((v, nbrs))
        for i, u in enumerate(nbrs):
            for w in nbrs[i + 1 :]:
                adj[u].add(w)
                adj[w].add(u)
        for u in nbrs:
            adj[u].discard(v)
        del adj[v]
    return out


def _td_from_elimination(order) -> TreeDecomposition:
    """Build a decomposition from an elimination order the standard way: the
    bag of v is v plus its neighbours at elimination, attached to the bag of
    the earliest-eliminated such neighbour."""
    pos = {v: i for i, (v, _) in enumerate(order)}
    bags: dict[int, frozenset[int]] = {}
    tree = nx.Graph()
    if not order:
        bags[0] = frozenset()
        tree.add_node(0)
        return TreeDecomposition(bags, tree, 0)
    for i, (v, nbrs) in enumerate(order):
        bags[i] = frozenset([v] + nbrs)
        tree.add_node(i)
    for i, (v, nbrs) in enumerate(order):
        if nbrs:
            parent = min(pos[u] for u in nbrs)
            tree.add_edge(i, parent)
        elif i + 1 < len(order):
            tree.add_edge(i, i + 1)  # keep disconnected pieces in one tree
    return TreeDecomposition(bags, tree, len(order) - 1)


def decompose(g: nx.Graph, seed: int = 0, restarts: int = DEFAULT_RESTARTS) -> TreeDecomposition:
    """Heuristic tree decomposition of a graph; width is the best of
    `restarts` seeded min-fill runs, not optimal."""
    rng = random.Random(seed)
    best = None
    for _ in range(max(1, restarts)):
        td = _td_from_elimination(_min_fill_order(g, rng))
        if best is None or td.width < best.width:
            best = td
    return best


def validate_td(g: nx.Graph, td: TreeDecomposition) -> bool:
    """Exhaustively check vertex coverage, edge coverage, and connectedness of
    every vertex's occurrence set."""
    covered = set()
    for b in td.bags.values():
        covered |= b
    if not set(g.nodes) <= covered:
        return False
    for u, v in g.edges:
        if not any(u in b and v in b for b in td.bags.values()):
            return False
    if td.bags and not nx.is_tree(td.tree):
        return False
    for v in g.nodes:
        occ = [t for t, b in td.bags.items() if v in b]
        sub = td.tree.subgraph(occ)
        if len(occ) > 1 and not nx.is_connected(sub):
            return False
    return True


def find_separator(
    g: nx.Graph, x, allowed, flow_bound: int = DEFAULT_FLOW_BOUND
) -> frozenset[int]:
    """A vertex set S within `allowed` cutting every path from x to the
    vertices outside `allowed`.

    Exact minimum cut via node-splitting max-flow while the flow value stays
    at most `flow_bound`; beyond that the frontier of `allowed` is returned.
    """
    x = frozenset(x) & set(g.nodes)
    allowed = frozenset(allowed) & set(g.nodes)
    targets = set(g.nodes) - allowed
    if not targets or not x:
        return frozenset()
    if not x <= allowed:
        raise PreconditionError("source vertices outside the removable set have no cut")

    inf = g.number_of_nodes() + flow_bound + 1
    flow = nx.DiGraph()
    for v in sorted(g.nodes):
        flow.add_edge(("i", v), ("o", v), capacity=1 if v in allowed else inf)
    for u, v in sorted(g.edges):
        flow.add_edge(("o", u), ("i", v), capacity=inf)
        flow.add_edge(("o", v), ("i", u), capacity=inf)
    for v in sorted(x):
        flow.add_edge("s", ("i", v), capacity=inf)
    for v in sorted(targets):
        flow.add_edge(("o", v), "t", capacity=inf)

    residual = edmonds_karp(flow, "s", "t", cutoff=flow_bound + 1)
    if residual.graph["flow_value"] > flow_bound:
        return frozenset(v for v in allowed if any(u in targets for u in g.neighbors(v)))

    # min cut nearest the target side: split edges leaving the set of nodes
    # that still reach the sink in the residual graph
    reach = {"t"}
    stack = ["t"]
    while stack:
        w = stack.pop()
        for u in residual.predecessors(w):
            if u not in reach and residual[u][w]["capacity"] - residual[u][w]["flow"] > 0:
                reach.add(u)
                stack.append(u)
    return frozenset(v for v in allowed if ("o", v) in reach and ("i", v) not in reach)


def separates(g: nx.Graph, sep, x, targets) -> bool:
    """True iff removing `sep` leaves no path from x to the target side."""
    sep = set(sep)
    rest = g.subgraph(set(g.nodes) - sep)
    seen = set(v for v in x if v not in sep)
    stack = list(seen)
    while stack:
        u = stack.pop()
        if u in targets:
            return False
        for v in rest.neighbors(u):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return not (set(x) & set(targets) - sep)


def order_from_td(td: TreeDecomposition, first) -> tuple[int, ...]:
    """First-occurrence variable order of a depth-first traversal from the
    root, children visited smaller subtree first, with `first` leading."""
    sizes: dict[int, int] = {}

    def size(node, parent):
        s = 1
        for c in td.children(node, parent):
            s += size(c, node)
        sizes[node] = s
        return s

    size(td.root, None)
    seen = list(first)
    seen_set = set(first)

    def visit(node, parent):
        for v in sorted(td.bags[node]):
            if v not in seen_set:
                seen_set.add(v)
                seen.append(v)
        for c in sorted(td.children(node, parent), key=lambda c: (sizes[c], c)):
            visit(c, node)

    visit(td.root, None)
    return tuple(seen)


def constrain_and_root(
    cnf: LabeledCnf,
    x,
    d,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    flow_bound: int = DEFAULT_FLOW_BOUND,
) -> tuple[TreeDecomposition, VariableOrder]:
    """Build a decomposition whose root bag is a separator inside x and the
    variables x defines, then emit the compilation variable order.

    The separator is turned into a clique before decomposing so some bag
    contains it; that bag is split so the root bag is exactly the separator,
    and the order lists the separator block first.
    """
    g = primal_graph(cnf)
    x = frozenset(x) & set(g.nodes)
    allowed = x | (frozenset(d) & set(g.nodes))
    targets = set(g.nodes) - allowed

    if not targets:
        td = decompose(g, seed=seed, restarts=restarts)
        return td, VariableOrder(order_from_td(td, ()), 0)

    sep = find_separator(g, x, allowed, flow_bound=flow_bound)
    g2 = g.copy()
    svs = sorted(sep)
    for i, u in enumerate(svs):
        for v in svs[i + 1 :]:
            g2.add_edge(u, v)
    td = decompose(g2, seed=seed, restarts=restarts)

    host = None
    for node in sorted(td.bags):
        if sep <= td.bags[node]:
            host = node
            break
    if td.bags[host] == sep:
        td.root = host
    else:
        new = max(td.bags) + 1
        td.bags[new] = frozenset(sep)
        td.tree.add_edge(new, host)
        td.root = new
    order = order_from_td(td, sorted(sep))
    return td, VariableOrder(order, len(sep))


def emit_td(td: TreeDecomposition, num_vertices: int) -> str:
    """PACE-style serialization for debugging and external comparison."""
    ids = {node: i + 1 for i, node in enumerate(sorted(td.bags))}
    lines = [f"s td {len(td.bags)} {td.width + 1} {num_vertices}"]
    for node in sorted(td.bags):
        lines.append(f"b {ids[node]} " + " ".join(str(v) for v in sorted(td.bags[node])))
    for u, v in sorted((min(ids[a], ids[b]), max(ids[a], ids[b])) for a, b in td.tree.edges):
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"
