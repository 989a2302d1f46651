"""Random instance generators and small fixtures shared by the test suite."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .devices import Device
from .graph import Digraph, ports_contain_loop_or_cutset
from .network import Multiport, rigidity
from .subspace import IndexSet, Subspace


def unit_disc(rng: np.random.Generator, size) -> np.ndarray:
    """Complex samples uniform on the closed unit disc."""
    r = np.sqrt(rng.uniform(size=size))
    t = rng.uniform(0, 2 * np.pi, size=size)
    return r * np.exp(1j * t)


def random_subspace(rng: np.random.Generator, index, dim: Optional[int] = None) -> Subspace:
    """Span of ``dim`` unit-disc vectors; ``dim`` is drawn when omitted."""
    index = index if isinstance(index, IndexSet) else IndexSet(index)
    n = len(index)
    if dim is None:
        dim = int(rng.integers(0, n + 1))
    rows = unit_disc(rng, (dim, n))
    # occasionally make the rows dependent to exercise rank detection
    if dim >= 2 and rng.uniform() < 0.2:
        rows[-1] = rows[0] * unit_disc(rng, ()) + rows[1] * unit_disc(rng, ())
    return Subspace.span(index, rows)


def random_digraph(rng: np.random.Generator, max_nodes: int = 10, max_edges: int = 20,
                   connected: bool = False) -> Digraph:
    n = int(rng.integers(1, max_nodes + 1))
    m = int(rng.integers(0, max_edges + 1))
    nodes = [f"n{k}" for k in range(n)]
    edges = []
    if connected:
        for k in range(1, n):
            j = int(rng.integers(0, k))
            a, b = (nodes[k], nodes[j]) if rng.uniform() < 0.5 else (nodes[j], nodes[k])
            edges.append((f"e{len(edges)}", a, b))
    while len(edges) < m:
        a, b = rng.choice(n, size=2)
        edges.append((f"e{len(edges)}", nodes[a], nodes[b]))
    return Digraph(tuple(nodes), tuple(edges))


def _connected_graph(rng, n_nodes: int, n_edges: int, prefix: str = "e") -> list[tuple[str, str, str]]:
    nodes = [f"n{k}" for k in range(n_nodes)]
    edges = []
    for k in range(1, n_nodes):
        j = int(rng.integers(0, k))
        a, b = (nodes[k], nodes[j]) if rng.uniform() < 0.5 else (nodes[j], nodes[k])
        edges.append((a, b))
    while len(edges) < n_edges:
        a, b = rng.choice(n_nodes, size=2, replace=n_nodes < 2)
        edges.append((nodes[a], nodes[b]))
    order = rng.permutation(len(edges))
    return [(f"{prefix}{k}", *edges[j]) for k, j in enumerate(order)]


def random_impedance(rng, k: int = 1, pd: bool = False, scale: float = 1.0) -> np.ndarray:
    z = unit_disc(rng, (k, k)) * scale
    if pd:
        # Hermitian part made positive definite
        a = unit_disc(rng, (k, k))
        z = z - 0.5 * (z + z.conj().T) + a @ a.conj().T + 0.2 * np.eye(k)
    else:
        z = z + np.eye(k) * rng.uniform(0.2, 1.5)
    return z


def _assign_devices(rng, internal: list[str], kinds: tuple[str, ...]) -> list[Device]:
    rest = list(internal)
    rng.shuffle(rest)
    out = []
    while rest:
        kind = kinds[int(rng.integers(0, len(kinds)))]
        if kind in ("ccvs", "vccs", "cccs", "vcvs", "impedance2") and len(rest) < 2:
            kind = "impedance"
        if kind == "impedance":
            e = rest.pop()
            out.append(Device.impedance(e, random_impedance(rng), unit_disc(rng, 1)))
        elif kind == "impedance2":
            es = [rest.pop(), rest.pop()]
            out.append(Device.impedance(es, random_impedance(rng, 2), unit_disc(rng, 2)))
        elif kind == "admittance":
            e = rest.pop()
            out.append(Device.admittance(e, random_impedance(rng), unit_disc(rng, 1)))
        elif kind == "vsource":
            out.append(Device.vsource(rest.pop(), unit_disc(rng, 1)))
        elif kind == "isource":
            out.append(Device.isource(rest.pop(), unit_disc(rng, 1)))
        else:
            c, d = rest.pop(), rest.pop()
            gain = unit_disc(rng, ()) * 2
            out.append(getattr(Device, kind)(c, d, gain))
    return out


DEFAULT_KINDS = ("impedance", "impedance", "impedance", "impedance2", "vsource", "isource",
                 "ccvs", "vccs", "cccs", "vcvs")


def random_multiport(rng: np.random.Generator, max_internal: int = 8, max_ports: int = 3,
                     kinds: tuple[str, ...] = DEFAULT_KINDS) -> Multiport:
    """A random multiport; rigidity is not guaranteed."""
    n_ports = int(rng.integers(1, max_ports + 1))
    n_int = int(rng.integers(1, max_internal + 1))
    n_nodes = int(rng.integers(2, min(n_int + n_ports, 7) + 1))
    edges = _connected_graph(rng, n_nodes, n_int + n_ports)
    names = [e[0] for e in edges]
    ports = [f"p{k}" for k in range(n_ports)]
    # rename the first edges to ports so names say what they are
    chosen = rng.choice(len(edges), size=n_ports, replace=False)
    ren = {names[j]: ports[k] for k, j in enumerate(chosen)}
    edges = [(ren.get(a, a), t, h) for a, t, h in edges]
    internal = [e[0] for e in edges if e[0] not in ports]
    g = Digraph.from_edges(edges)
    return Multiport(g, tuple(ports), tuple(_assign_devices(rng, internal, kinds)))


def random_rigid_multiport(rng: np.random.Generator, max_tries: int = 200, **kw) -> Multiport:
    for _ in range(max_tries):
        m = random_multiport(rng, **kw)
        if rigidity(m).rigid:
            return m
    raise RuntimeError("no rigid multiport found")


def random_nonrigid_multiport(rng: np.random.Generator, max_tries: int = 500) -> Multiport:
    """A multiport failing the rank test.

    Built by adding a defect to a rigid one (a floating norator, a source
    loop, or a source cutset), or drawn directly from source-heavy mixes.
    """
    for _ in range(max_tries):
        mode = int(rng.integers(0, 4))
        if mode == 3:
            m = random_multiport(rng, kinds=("vsource", "isource", "impedance"))
            if not rigidity(m).rigid:
                return m
            continue
        base = random_rigid_multiport(rng)
        g = base.graph
        nodes = list(g.nodes)
        a, b = nodes[0], nodes[-1] if len(nodes) > 1 else nodes[0]
        extra_edges = list(g.edges)
        devices = list(base.devices)
        if mode == 0:
            extra_edges.append(("x0", "fa", "fb"))
            extra_edges.append(("x1", "fa", "fb"))
            devices += [Device.norator("x0"), Device.impedance("x1", 1.0)]
        elif mode == 1:
            extra_edges += [("x0", a, b), ("x1", a, b)]
            devices += [Device.vsource("x0", 1.0), Device.vsource("x1", 2.0)]
        else:
            extra_edges += [("x0", a, "fz"), ("x1", "fz", b)]
            devices += [Device.isource("x0", 1.0), Device.isource("x1", 2.0)]
        m = Multiport(Digraph.from_edges(extra_edges, nodes), base.ports, tuple(devices))
        if not rigidity(m).rigid:
            return m
    raise RuntimeError("no non-rigid multiport found")


def random_passive_multiport(rng: np.random.Generator, max_internal: int = 8, max_ports: int = 3,
                             strict: bool = True, max_tries: int = 500) -> Multiport:
    """Impedance-only multiport with positive definite Hermitian parts.

    Ports are chosen to contain no loop and no cutset.
    """
    for _ in range(max_tries):
        m = random_multiport(rng, max_internal, max_ports, kinds=("impedance",))
        if ports_contain_loop_or_cutset(m.graph, m.ports) != "no":
            continue
        devs = tuple(Device.impedance(d.edges, random_impedance(rng, len(d.edges), pd=True),
                                      unit_disc(rng, len(d.edges))) for d in m.devices)
        return Multiport(m.graph, m.ports, devs)
    raise RuntimeError("no passive multiport found")


def attach_dedicated_port(rng: np.random.Generator, m: Multiport, z=None) -> Multiport:
    """Add a port that sees only one new impedance edge ``xs``.

    The port ``pz`` and ``xs`` join an existing node to a fresh one, so the
    port contains no loop or cutset and its behaviour is that of ``xs``.
    """
    z = random_impedance(rng, 1, pd=True) if z is None else np.atleast_2d(z)
    a = m.graph.nodes[int(rng.integers(0, len(m.graph.nodes)))]
    edges = list(m.graph.edges) + [("pz", a, "fz"), ("xs", a, "fz")]
    g = Digraph.from_edges(edges, m.graph.nodes)
    return Multiport(g, m.ports + ("pz",), m.devices + (Device.impedance("xs", z),))


def replace_device(m: Multiport, index: int, new: Device) -> Multiport:
    devs = list(m.devices)
    devs[index] = new
    return Multiport(m.graph, m.ports, tuple(devs))


def lossless_like(rng: np.random.Generator, d: Device) -> Device:
    """Impedance on the same edges with ``Z + Z* = 0``."""
    k = len(d.edges)
    a = unit_disc(rng, (k, k))
    return Device.impedance(d.edges, 0.5 * (a - a.conj().T) + 1j * np.eye(k))


# -- fixtures -------------------------------------------------------------------

ER_NETLIST = """\
# ideal source E in series with impedance R, seen through port p1
edge e1 n1 n2
edge r1 n2 n3
edge p1 n1 n3
port p1
device vsource {E} on e1
device impedance {R} on r1
"""


def source_impedance_1port(e=10.0, z=5.0) -> Multiport:
    """Port ``p1`` sees ``v = z i + e`` with the entering current ``i``."""
    g = Digraph.from_edges([("e1", "n1", "n2"), ("r1", "n2", "n3"), ("p1", "n1", "n3")])
    return Multiport(g, ("p1",), (Device.vsource("e1", e), Device.impedance("r1", z)))


def floating_norator_1port() -> Multiport:
    g = Digraph.from_edges([("r1", "n1", "n2"), ("p1", "n1", "n2"), ("x1", "n3", "n4"),
                            ("x2", "n3", "n4")])
    return Multiport(g, ("p1",), (Device.impedance("r1", 1.0), Device.norator("x1"),
                                  Device.impedance("x2", 1.0)))


def parallel_sources_1port(e1=1.0, e2=2.0) -> Multiport:
    g = Digraph.from_edges([("s1", "n1", "n2"), ("s2", "n1", "n2"), ("p1", "n1", "n2")])
    return Multiport(g, ("p1",), (Device.vsource("s1", e1), Device.vsource("s2", e2)))
