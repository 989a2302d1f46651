"""Multiports: a graph with designated port edges and devices on the rest."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import graph as _graph
from .devices import Device, DeviceError, assemble_characteristic, device_adjoint
from .graph import Digraph
from .subspace import (
    TOL, AffineSpace, IndexSet, Subspace, Void, intersection,
    matched_composition, orthogonal_complement, restriction, contraction, sign_flip,
    subspace_sum,
)


@dataclass(frozen=True, eq=False)
class Multiport:
    """``N_P = (G_SP, A_SS")``.

    Port edges carry no device.  Every other edge carries exactly one.
    A multiport with no ports is an ordinary network.
    """

    graph: Digraph
    ports: tuple[str, ...]
    devices: tuple[Device, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "ports", tuple(self.ports))
        object.__setattr__(self, "devices", tuple(self.devices))
        names = set(self.graph.edge_names)
        if len(set(self.ports)) != len(self.ports):
            raise DeviceError("port listed twice")
        unknown = set(self.ports) - names
        if unknown:
            raise DeviceError(f"ports on unknown edges: {sorted(unknown)}")
        covered: set[str] = set()
        for d in self.devices:
            for e in d.edges:
                if e in self.ports:
                    raise DeviceError(f"port edge {e} carries a device")
                if e in covered:
                    raise DeviceError(f"edge {e} carries two devices")
                if e not in names:
                    raise DeviceError(f"device on unknown edge {e}")
                covered.add(e)
        missing = names - covered - set(self.ports)
        if missing:
            raise DeviceError(f"edges without a device: {sorted(missing)}")

    @property
    def internal_edges(self) -> tuple[str, ...]:
        return tuple(e for e in self.graph.edge_names if e not in set(self.ports))

    @property
    def port_index(self) -> IndexSet:
        return IndexSet.pairs(self.ports)

    @property
    def device_index(self) -> IndexSet:
        return IndexSet.pairs(self.internal_edges)

    def characteristic(self, tol: float = TOL):
        """Device characteristic ``A_SS"`` on the internal edges."""
        return assemble_characteristic(self.devices, self.internal_edges, tol)

    def renamed(self, prefix: str) -> "Multiport":
        return Multiport(
            self.graph.renamed(prefix),
            tuple(prefix + p for p in self.ports),
            tuple(d.renamed(prefix) for d in self.devices),
        )


def topological_space(m: Multiport) -> Subspace:
    return _graph.topological_space(m.graph)


def to_entering(k, ports: IndexSet | None = None):
    """Switch port currents between graph orientation and the entering convention.

    This is the single place where port currents change sign; it is an involution.
    """
    index = k.index if ports is None else ports
    return sign_flip(k, index.currents())


def solution_set(m: Multiport, tol: float = TOL):
    """All edge vectors obeying Kirchhoff's laws and the devices (possibly Void)."""
    return intersection(topological_space(m), m.characteristic(tol), tol)


def port_behaviour_oracle(m: Multiport, tol: float = TOL):
    """Port behaviour by direct elimination, currents entering the multiport."""
    k = matched_composition(topological_space(m), m.characteristic(tol), tol)
    if isinstance(k, Void):
        return k
    return to_entering(k)


def homogeneous(m: Multiport) -> Multiport:
    return Multiport(m.graph, m.ports, tuple(d.homogeneous() for d in m.devices))


def adjoint_multiport(m: Multiport) -> Multiport:
    """Same graph and ports, every device replaced by its adjoint.

    Edge names are kept; callers that need a disjoint copy use :meth:`Multiport.renamed`.
    """
    return Multiport(m.graph, m.ports, tuple(device_adjoint(d) for d in m.devices))


@dataclass(frozen=True, eq=False)
class RigidityVerdict:
    rigid: bool
    full_sum: bool
    zero_intersection: bool
    witness: Optional[np.ndarray] = None
    witness_index: Optional[IndexSet] = None
    witness_kind: str = ""   # "unreachable-source" or "free-interior"
    dual_agrees: Optional[bool] = None

    def to_json(self) -> dict:
        from .subspace import complex_to_json
        out = {
            "rigid": self.rigid,
            "full_sum": self.full_sum,
            "zero_intersection": self.zero_intersection,
        }
        if self.witness is not None:
            out["witness"] = {
                "kind": self.witness_kind,
                "labels": [str(lab) for lab in self.witness_index.labels],
                "vector": [complex_to_json(z) for z in self.witness],
            }
        if self.dual_agrees is not None:
            out["dual_agrees"] = self.dual_agrees
        return out


def _rigidity_pair(v_top: Subspace, v_dev: Subspace, t: IndexSet, tol: float):
    """Full-sum and zero-intersection tests for the pair ``{V_AB, V_B}`` on ``B = t``."""
    n = len(t)
    s = subspace_sum(restriction(v_top, t, tol), v_dev, tol)
    full_sum = s.dim == n
    i = intersection(contraction(v_top, t, tol), v_dev, tol)
    zero_int = i.dim == 0
    return full_sum, zero_int, s, i


def rigidity(m: Multiport, tol: float = TOL, dual: bool = False) -> RigidityVerdict:
    """Rank tests for rigidity on the topology and device translate.

    ``full_sum``: every source assignment is consistent.
    ``zero_intersection``: the port condition fixes the interior.
    With ``dual=True`` the same tests on the complements are run as a cross-check.
    """
    t = m.device_index
    v_top = topological_space(m)
    a = m.characteristic(tol)
    v_dev = a.translate if isinstance(a, AffineSpace) else a
    full_sum, zero_int, s, i = _rigidity_pair(v_top, v_dev, t, tol)
    witness = windex = None
    kind = ""
    if not full_sum:
        witness, windex, kind = orthogonal_complement(s, tol).basis[0], t, "unreachable-source"
    elif not zero_int:
        witness, windex, kind = i.basis[0], t, "free-interior"
    agrees = None
    if dual:
        fs2, zi2, _, _ = _rigidity_pair(
            orthogonal_complement(v_top, tol), orthogonal_complement(v_dev, tol), t, tol)
        agrees = (fs2 and zi2) == (full_sum and zero_int)
    return RigidityVerdict(full_sum and zero_int, full_sum, zero_int, witness, windex, kind, agrees)
