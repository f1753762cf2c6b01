"""Target specifications: grid cluster graphs, quadrature colorings, corrections.

A cluster state puts one qubit on every lattice node and a C-Phase link on
every lattice edge.  The bus can only entangle qubits coupled to opposite
quadratures, so every target carries a proper 2-coloring; for grids the
convention is fixed by (row + col) parity.  The generated interaction on an
edge is exp(+-i pi/4 ZZ), which is a C-Phase up to the per-qubit diagonal
corrections computed here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import Quadrature, pair_key


@dataclass(frozen=True)
class GridSpec:
    """An n x m grid: n rows (layer length), m columns (total width)."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 2 or self.m < 2:
            raise ValueError(f"grid needs n, m >= 2, got {self.n} x {self.m}")

    @property
    def qubit_count(self) -> int:
        return self.n * self.m

    def index(self, r: int, c: int) -> int:
        """Row-major qubit index of cell (r, c)."""
        if not (0 <= r < self.n and 0 <= c < self.m):
            raise ValueError(f"cell ({r},{c}) outside {self.n} x {self.m} grid")
        return r * self.m + c

    def coords(self, q: int) -> tuple[int, int]:
        if not 0 <= q < self.qubit_count:
            raise ValueError(f"qubit {q} outside {self.n} x {self.m} grid")
        return divmod(q, self.m)


@dataclass
class TargetGraph:
    """A target adjacency: which qubit pairs should end up C-Phase linked."""

    qubit_count: int
    edges: set[tuple[int, int]] = field(default_factory=set)

    def __post_init__(self):
        normalized = set()
        for a, b in self.edges:
            if not (0 <= a < self.qubit_count and 0 <= b < self.qubit_count):
                raise ValueError(f"edge ({a},{b}) outside register of {self.qubit_count}")
            normalized.add(pair_key(a, b))
        self.edges = normalized

    def has_edge(self, a: int, b: int) -> bool:
        return pair_key(a, b) in self.edges

    def neighbors(self, q: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == q:
                out.append(b)
            elif b == q:
                out.append(a)
        return sorted(out)

    def degree(self, q: int) -> int:
        return len(self.neighbors(q))


def grid_graph(spec: GridSpec) -> TargetGraph:
    """Materialize the n x m lattice: horizontal + vertical nearest neighbors."""
    edges = set()
    for r in range(spec.n):
        for c in range(spec.m):
            q = spec.index(r, c)
            if c + 1 < spec.m:
                edges.add((q, spec.index(r, c + 1)))
            if r + 1 < spec.n:
                edges.add((q, spec.index(r + 1, c)))
    return TargetGraph(spec.qubit_count, edges)


def grid_coloring(spec: GridSpec) -> list[Quadrature]:
    """Fixed grid convention: (r + c) even couples momentum, odd position."""
    out = []
    for q in range(spec.qubit_count):
        r, c = spec.coords(q)
        out.append(Quadrature.MOMENTUM if (r + c) % 2 == 0 else Quadrature.POSITION)
    return out


def checkerboard_coloring(graph: TargetGraph) -> list[Quadrature]:
    """Proper 2-coloring of a bipartite target.

    Component roots (smallest index) get momentum, so a grid reproduces the
    (r + c) parity convention exactly.  A non-bipartite input raises with an
    odd cycle as the witness.
    """
    colors: list[Quadrature | None] = [None] * graph.qubit_count
    adj: dict[int, list[int]] = {q: [] for q in range(graph.qubit_count)}
    for a, b in graph.edges:
        adj[a].append(b)
        adj[b].append(a)
    parent: dict[int, int] = {}
    for root in range(graph.qubit_count):
        if colors[root] is not None:
            continue
        colors[root] = Quadrature.MOMENTUM
        queue = [root]
        while queue:
            q = queue.pop(0)
            for nb in adj[q]:
                if colors[nb] is None:
                    colors[nb] = colors[q].other
                    parent[nb] = q
                    queue.append(nb)
                elif colors[nb] is colors[q]:
                    raise ValueError(
                        f"target is not bipartite: odd cycle {_odd_cycle(parent, q, nb)}"
                    )
    assert all(c is not None for c in colors)
    return colors  # type: ignore[return-value]


def _odd_cycle(parent: dict[int, int], a: int, b: int) -> list[int]:
    """Reconstruct the odd cycle closed by edge (a, b) in the BFS forest."""
    path_a, path_b = [a], [b]
    seen = {a: 0}
    node = a
    while node in parent:
        node = parent[node]
        seen[node] = len(path_a)
        path_a.append(node)
    node = b
    while node not in seen:
        node = parent[node]
        path_b.append(node)
    join = seen[node]
    return path_a[: join + 1] + list(reversed(path_b))


def local_corrections(
    graph: TargetGraph, signs: dict[tuple[int, int], int]
) -> list[tuple[int, int]]:
    """Per-qubit diagonal corrections turning the +-pi/4 ZZ phases into C-Phase.

    Returns one (phase on |0>, phase on |1>) pair per qubit, in pi/8 units.
    A +pi/4 edge needs -pi/8 on |0> and +3pi/8 on |1> at both endpoints; a
    -pi/4 edge needs the conjugate.  Corrections from multiple incident edges
    compose additively.
    """
    out = [(0, 0)] * graph.qubit_count
    for edge in graph.edges:
        if edge not in signs:
            raise ValueError(f"missing realized sign for edge {edge}")
        sign = signs[edge]
        if sign not in (1, -1):
            raise ValueError(f"edge sign must be +1 or -1, got {sign!r} on {edge}")
        for q in edge:
            z0, z1 = out[q]
            out[q] = (z0 - sign, z1 + 3 * sign)
    return out
