"""
Connected sub-grids of the surviving transmission network.

A sub-grid is functional when it holds at least one in-service generator and
at least one intact feeder; anything else cannot serve load.
"""

from dataclasses import dataclass, field, replace

import networkx as nx

from app.grid.base import GridModel


@dataclass(frozen=True)
class Topology:
    """Everything outside the static grid that decides connectivity at a step."""

    out_lines: frozenset[str] = frozenset()
    dead_buses: frozenset[str] = frozenset()
    failed_feeders: frozenset[str] = frozenset()
    offline_generators: frozenset[str] = frozenset()
    committed: frozenset[str] = frozenset()

    def without_lines(self, lines) -> "Topology":
        return replace(self, out_lines=self.out_lines | frozenset(lines))


@dataclass(frozen=True)
class SubGrid:
    buses: tuple[str, ...]
    lines: tuple[str, ...] = ()
    generators: tuple[str, ...] = ()
    feeders: tuple[str, ...] = ()
    slack: str | None = None
    functional: bool = False
    bus_set: frozenset[str] = field(default=frozenset(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "bus_set", frozenset(self.buses))

    @property
    def key(self) -> str:
        return self.buses[0] if self.buses else ""


def _pick_slack(grid: GridModel, generators: list[str], committed: frozenset[str], buses: list[str]) -> str | None:
    if not buses:
        return None
    units = [grid.generator_by_id[g] for g in generators]
    for pool in (
        [g for g in units if g.synchronous and g.id in committed],
        [g for g in units if g.synchronous],
        units,
    ):
        if pool:
            best = min(pool, key=lambda g: (-g.inertia, g.id))
            return best.bus
    return buses[0]


def network_graph(grid: GridModel, topology: Topology) -> nx.MultiGraph:
    g = nx.MultiGraph()
    g.add_nodes_from(b.id for b in grid.buses if b.id not in topology.dead_buses)
    for ln in grid.lines:
        if ln.id in topology.out_lines:
            continue
        if ln.from_bus in topology.dead_buses or ln.to_bus in topology.dead_buses:
            continue
        g.add_edge(ln.from_bus, ln.to_bus, key=ln.id)
    return g


def find_subgrids(grid: GridModel, topology: Topology) -> tuple[SubGrid, ...]:
    """Partition surviving buses into sub-grids, ordered by their lowest bus id."""
    graph = network_graph(grid, topology)
    out = []
    for component in nx.connected_components(graph):
        buses = sorted(component)
        lines = sorted(k for u, v, k in graph.subgraph(component).edges(keys=True))
        generators = sorted(
            g.id
            for b in buses
            for g in grid.generators_at_bus.get(b, ())
            if g.available and g.id not in topology.offline_generators
        )
        feeders = sorted(
            f.id for b in buses for f in grid.feeders_at_bus.get(b, ()) if f.id not in topology.failed_feeders
        )
        out.append(
            SubGrid(
                buses=tuple(buses),
                lines=tuple(lines),
                generators=tuple(generators),
                feeders=tuple(feeders),
                slack=_pick_slack(grid, generators, topology.committed, buses),
                functional=bool(generators) and bool(feeders),
            )
        )
    return tuple(sorted(out, key=lambda s: s.key))
