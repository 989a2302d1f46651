"""Port behaviour of a rigid multiport by terminating it with its adjoint."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np
import scipy.linalg

from .devices import Device
from .graph import topology_rows
from .network import Multiport, adjoint_multiport, homogeneous, port_behaviour_oracle
from .subspace import (
    TOL, AffineSpace, IndexSet, Subspace, Void, complex_to_json, ilabel, lstsq_consistent,
    rank_of, rref, vlabel,
)

ADJ = "~"  # prefix for the adjoint copy in the large network

Termination = Literal["gyrator", "transformer"]
Excitation = Optional[tuple[int, Literal["v", "i"]]]


class NotRigid(Exception):
    """Raised when the terminated network has no unique solution."""

    def __init__(self, status: "Status", message: str = ""):
        super().__init__(message or f"multiport is not rigid ({status.value})")
        self.status = status


class Status(str, enum.Enum):
    UNIQUE = "unique"
    NON_UNIQUE = "non-unique"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True, eq=False)
class TerminatedNetwork:
    """A portless network ``[N_P (+) N^adj] ∩ T`` with ``T`` a gyrator or transformer."""

    network: Multiport
    ports: tuple[str, ...]
    adjoint_ports: tuple[str, ...]
    termination: str
    excitation: Excitation = None


def build_large_network(m: Multiport, termination: Termination = "gyrator",
                        excitation: Excitation = None) -> TerminatedNetwork:
    """Couple ``m`` to a renamed copy of its adjoint through each port pair.

    ``excitation=(t, "v")`` shifts the voltage equation of gyrator ``t`` by one
    (``v_t + 1 = -i~_t``), ``(t, "i")`` the current equation (``i_t + 1 = v~_t``).
    With an excitation the sources of ``m`` are switched off.
    """
    if termination not in ("gyrator", "transformer"):
        raise ValueError(f"unknown termination {termination!r}")
    if termination == "transformer" and excitation is not None:
        raise ValueError("the transformer termination takes no excitation")
    base = m if excitation is None else homogeneous(m)
    adj = adjoint_multiport(m).renamed(ADJ)
    p, pt = m.ports, adj.ports
    g = base.graph.disjoint_union(adj.graph)
    devices = list(base.devices) + list(adj.devices)
    if p:
        if termination == "gyrator":
            sv = np.zeros(len(p))
            si = np.zeros(len(p))
            if excitation is not None:
                t, kind = excitation
                if not 0 <= t < len(p):
                    raise IndexError(f"excitation port {t} out of range")
                if kind == "v":
                    sv[t] = -1.0
                elif kind == "i":
                    si[t] = 1.0
                else:
                    raise ValueError(f"unknown excitation kind {kind!r}")
            devices.append(Device.gyrator(p + pt, 1.0, sv, si))
        else:
            devices.append(Device.transformer(p + pt, 1.0))
    return TerminatedNetwork(Multiport(g, (), tuple(devices)), p, pt, termination, excitation)


@dataclass(frozen=True, eq=False)
class Solution:
    status: Status
    x: Optional[np.ndarray]
    index: IndexSet

    def value(self, label) -> complex:
        return complex(self.x[self.index.position(label)])


def network_system(net: Multiport) -> tuple[IndexSet, np.ndarray, np.ndarray]:
    """Topology rows and device rows of a portless network, ``(index, A, b)``."""
    if net.ports:
        raise ValueError("network_system expects a portless network")
    index, top = topology_rows(net.graph)
    rows = [top]
    rhs = [np.zeros(top.shape[0], dtype=complex)]
    for d in net.devices:
        c, s = d.constraints()
        block = np.zeros((c.shape[0], len(index)), dtype=complex)
        block[:, index.positions(d.labels)] = c
        rows.append(block)
        rhs.append(np.asarray(s, dtype=complex))
    return index, np.vstack(rows).astype(complex), np.concatenate(rhs)


class LinearSystem:
    """A coefficient matrix factored once and reused across right-hand sides."""

    def __init__(self, a: np.ndarray, tol: float = TOL):
        self.a = np.asarray(a, dtype=complex)
        self.tol = tol
        m, n = self.a.shape
        sv = np.linalg.svd(self.a, compute_uv=False) if self.a.size else np.zeros(0)
        self.rank = rank_of(sv, self.a.shape, tol) if self.a.size else 0
        self.nonsingular = m == n and self.rank == n
        self._lu = scipy.linalg.lu_factor(self.a) if self.nonsingular and n else None

    def solve(self, b: np.ndarray) -> tuple[Status, Optional[np.ndarray]]:
        b = np.asarray(b, dtype=complex)
        n = self.a.shape[1]
        if self.nonsingular:
            if n == 0:
                return Status.UNIQUE, np.zeros(0, dtype=complex)
            return Status.UNIQUE, scipy.linalg.lu_solve(self._lu, b)
        x, ok, r = lstsq_consistent(self.a, b, self.tol)
        if not ok:
            return Status.INCONSISTENT, None
        if r < n:
            return Status.NON_UNIQUE, x
        return Status.UNIQUE, x


def solve_unique(n: TerminatedNetwork | Multiport, tol: float = TOL) -> Solution:
    net = n.network if isinstance(n, TerminatedNetwork) else n
    index, a, b = network_system(net)
    status, x = LinearSystem(a, tol).solve(b)
    return Solution(status, x if status is Status.UNIQUE else None, index)


def _port_vector(x: np.ndarray, index: IndexSet, ports: Sequence[str]) -> np.ndarray:
    """``(v_P, -i_P)`` in canonical pair order over ``ports``."""
    pidx = IndexSet.pairs(ports)
    out = np.empty(len(pidx), dtype=complex)
    for k, lab in enumerate(pidx):
        val = x[index.position(lab)]
        out[k] = -val if lab.kind == 1 else val
    return out


def extract_port_behaviour(m: Multiport, tol: float = TOL) -> "PortBehaviour":
    """Generalized Thevenin-Norton: one live solve and ``2|P|`` unit excitations.

    Raises :class:`NotRigid` when the terminated network has no unique solution.
    """
    live = build_large_network(m, "gyrator")
    index, a, b0 = network_system(live.network)
    system = LinearSystem(a, tol)
    status, x0 = system.solve(b0)
    if status is not Status.UNIQUE:
        raise NotRigid(status)
    p = m.ports
    rhs = []
    for t in range(len(p)):
        for kind in ("v", "i"):
            _, _, bt = network_system(build_large_network(m, "gyrator", (t, kind)).network)
            rhs.append(bt)
    particular = _port_vector(x0, index, p)
    gens = []
    if rhs:
        # only the gyrator source rows differ, so the factorization is shared
        xs = np.column_stack([system.solve(bt)[1] for bt in rhs])
        gens = [_port_vector(xs[:, k], index, p) for k in range(xs.shape[1])]
    pidx = IndexSet.pairs(p)
    gen = np.array(gens).reshape(-1, len(pidx))
    space = AffineSpace(particular, Subspace.span(pidx, gen, tol))
    return PortBehaviour(space, tuple(p), tol)


@dataclass(frozen=True, eq=False)
class PortBehaviour:
    """Affine port behaviour with currents entering the multiport.

    The canonical form is ``(B | -Q | s)`` in reduced row echelon form, with
    columns ordered as port voltages then port currents, each in port order.
    """

    space: AffineSpace
    ports: tuple[str, ...]
    tol: float = TOL

    @classmethod
    def from_oracle(cls, m: Multiport, tol: float = TOL) -> "PortBehaviour":
        k = port_behaviour_oracle(m, tol)
        if isinstance(k, Void):
            raise NotRigid(Status.INCONSISTENT, "multiport equations are inconsistent")
        if isinstance(k, Subspace):
            k = AffineSpace.of(k)
        return cls(k, tuple(m.ports), tol)

    @classmethod
    def from_matrices(cls, ports: Sequence[str], b, q, s, tol: float = TOL) -> "PortBehaviour":
        """Behaviour ``{(v, i) : B v - Q i = s}``."""
        ports = tuple(ports)
        n = len(ports)
        b = np.asarray(b, dtype=complex).reshape(-1, n)
        q = np.asarray(q, dtype=complex).reshape(-1, n)
        labels = [vlabel(e) for e in ports] + [ilabel(e) for e in ports]
        a = AffineSpace.from_constraints(labels, np.hstack([b, -q]), s, tol)
        if isinstance(a, Void):
            raise ValueError("port behaviour equations are inconsistent")
        return cls(a, ports, tol)

    @property
    def labels(self) -> list:
        return [vlabel(e) for e in self.ports] + [ilabel(e) for e in self.ports]

    @property
    def n_ports(self) -> int:
        return len(self.ports)

    def _order(self) -> np.ndarray:
        return self.space.index.positions(self.labels)

    def canonical(self) -> np.ndarray:
        """The augmented matrix ``(B | -Q | s)`` in reduced row echelon form."""
        c, s = self.space.constraints(self.tol)
        c = c[:, self._order()]
        aug = np.hstack([c, s.reshape(-1, 1)])
        return rref(aug, self.tol) if aug.shape[0] else aug.reshape(0, 2 * self.n_ports + 1)

    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(B, Q, s)`` from the canonical form."""
        aug = self.canonical()
        n = self.n_ports
        return aug[:, :n], -aug[:, n:2 * n], aug[:, 2 * n]

    def point(self) -> np.ndarray:
        """Particular vector in voltages-then-currents order."""
        return self.space.particular[self._order()]

    def translate_basis(self) -> np.ndarray:
        """Orthonormal translate basis, columns in voltages-then-currents order."""
        return self.space.translate.basis[:, self._order()]

    def representation(self) -> tuple[str, tuple[str, ...]]:
        """``(kind, P1)`` for the first invertible immittance form found.

        ``kind`` is impedance, admittance, hybrid or none.  ``P1`` are the ports
        whose current is expressed through their voltage in a hybrid form.
        """
        b, q, _ = self.matrices()
        n = self.n_ports
        if b.shape[0] != n:
            return "none", ()
        if n == 0:
            return "impedance", ()
        c = np.hstack([b, -q])
        for size in range(n + 1):
            for p1 in itertools.combinations(range(n), size):
                # solvable for (i_P1, v_P2)
                cols = [n + k for k in p1] + [k for k in range(n) if k not in p1]
                sub = c[:, cols]
                sv = np.linalg.svd(sub, compute_uv=False)
                if rank_of(sv, sub.shape, self.tol) == n:
                    kind = "impedance" if size == 0 else "admittance" if size == n else "hybrid"
                    return kind, tuple(self.ports[k] for k in p1)
        return "none", ()

    def thevenin(self) -> Optional[tuple[np.ndarray, np.ndarray]]:
        """``(Z, E)`` with ``v = Z i + E``, or None when ``B`` is singular."""
        b, q, s = self.matrices()
        n = self.n_ports
        if b.shape[0] != n:
            return None
        if n == 0:
            return np.zeros((0, 0), complex), np.zeros(0, complex)
        sv = np.linalg.svd(b, compute_uv=False)
        if rank_of(sv, b.shape, self.tol) < n:
            return None
        return np.linalg.solve(b, q), np.linalg.solve(b, s)

    def equals(self, other: "PortBehaviour", tol: float = 1e-8) -> bool:
        return self.residual(other) <= tol

    def residual(self, other: "PortBehaviour") -> float:
        return self.space.residual(other.space)

    def to_json(self) -> dict:
        b, q, s = self.matrices()
        kind, p1 = self.representation()
        enc = lambda a: [[complex_to_json(z) for z in row] for row in a]  # noqa: E731
        return {
            "ports": list(self.ports),
            "columns": [str(lab) for lab in self.labels],
            "rows": int(b.shape[0]),
            "B": enc(b),
            "Q": enc(q),
            "s": [complex_to_json(z) for z in s],
            "representation": {"kind": kind, "current_controlled_by_voltage": list(p1)},
        }
