"""
Device characteristics as affine spaces on their edges' voltage and current labels.

Each device writes its constraints in the local variable order
``(v_1, ..., v_k, i_1, ..., i_k)`` over its edge list.  Sources live only in
the right-hand side, so zeroing them gives the vector-space translate.

Two-edge controlled sources take their controlling edge first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .subspace import (
    TOL, AffineSpace, IndexSet, Subspace, Void, adjoint, direct_sum, ilabel, rank_of, vlabel,
)


class DeviceKind(str, enum.Enum):
    IMPEDANCE = "impedance"
    ADMITTANCE = "admittance"
    HYBRID = "hybrid"
    VSOURCE = "vsource"
    ISOURCE = "isource"
    NORATOR = "norator"
    NULLATOR = "nullator"
    GYRATOR = "gyrator"
    TRANSFORMER = "transformer"
    CCVS = "ccvs"
    VCCS = "vccs"
    CCCS = "cccs"
    VCVS = "vcvs"
    GENERIC = "generic"


K = DeviceKind

# parameters that only shift the particular vector
SOURCE_PARAMS = {
    K.IMPEDANCE: ("E",), K.ADMITTANCE: ("J",), K.HYBRID: ("J", "E"),
    K.VSOURCE: ("E",), K.ISOURCE: ("J",), K.GYRATOR: ("sv", "si"), K.GENERIC: ("s",),
}

CONTROLLED = (K.CCVS, K.VCCS, K.CCCS, K.VCVS)


class DeviceError(ValueError):
    """A malformed device."""


def _mat(x, shape=None, name="matrix") -> np.ndarray:
    a = np.array(x, dtype=complex)
    if a.ndim == 0 and shape:
        a = a.reshape((1,) * len(shape))
    if shape is not None and a.shape != shape:
        raise DeviceError(f"{name} has shape {a.shape}, expected {shape}")
    a.setflags(write=False)
    return a


def _vec(x, n, name) -> np.ndarray:
    if x is None:
        return _mat(np.zeros(n), (n,), name)
    a = np.array(x, dtype=complex).reshape(-1)
    if a.size == 1 and n != 1:
        a = np.full(n, a[0])
    return _mat(a, (n,), name)


@dataclass(frozen=True, eq=False)
class Device:
    kind: DeviceKind
    edges: tuple[str, ...]
    params: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "kind", DeviceKind(self.kind))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(set(self.edges)) != len(self.edges):
            raise DeviceError("device lists an edge twice")
        if not self.edges:
            raise DeviceError("device has no edges")
        object.__setattr__(self, "params", _normalize(self.kind, len(self.edges), dict(self.params)))

    # -- constructors -------------------------------------------------------

    @classmethod
    def impedance(cls, edges, z, e=None):
        return cls(K.IMPEDANCE, _edges(edges), {"Z": z, "E": e})

    @classmethod
    def admittance(cls, edges, y, j=None):
        return cls(K.ADMITTANCE, _edges(edges), {"Y": y, "J": j})

    @classmethod
    def hybrid(cls, edges, g11, h12, h21, r22, j=None, e=None):
        return cls(K.HYBRID, _edges(edges),
                   {"g11": g11, "h12": h12, "h21": h21, "r22": r22, "J": j, "E": e})

    @classmethod
    def vsource(cls, edges, e):
        return cls(K.VSOURCE, _edges(edges), {"E": e})

    @classmethod
    def isource(cls, edges, j):
        return cls(K.ISOURCE, _edges(edges), {"J": j})

    @classmethod
    def norator(cls, edges):
        return cls(K.NORATOR, _edges(edges))

    @classmethod
    def nullator(cls, edges):
        return cls(K.NULLATOR, _edges(edges))

    @classmethod
    def gyrator(cls, edges, r=1.0, sv=None, si=None):
        return cls(K.GYRATOR, _edges(edges), {"R": r, "sv": sv, "si": si})

    @classmethod
    def transformer(cls, edges, n=1.0):
        return cls(K.TRANSFORMER, _edges(edges), {"n": n})

    @classmethod
    def ccvs(cls, control, controlled, r):
        return cls(K.CCVS, (control, controlled), {"r": r})

    @classmethod
    def vccs(cls, control, controlled, g):
        return cls(K.VCCS, (control, controlled), {"g": g})

    @classmethod
    def cccs(cls, control, controlled, alpha):
        return cls(K.CCCS, (control, controlled), {"alpha": alpha})

    @classmethod
    def vcvs(cls, control, controlled, beta):
        return cls(K.VCVS, (control, controlled), {"beta": beta})

    @classmethod
    def generic(cls, edges, b, q, s=None):
        """Device defined by ``B v - Q i = s``."""
        return cls(K.GENERIC, _edges(edges), {"B": b, "Q": q, "s": s})

    # -- behaviour ------------------------------------------------------------

    def __repr__(self) -> str:
        return f"Device({self.kind.value}, {list(self.edges)})"

    @property
    def labels(self) -> list:
        return [vlabel(e) for e in self.edges] + [ilabel(e) for e in self.edges]

    def constraints(self) -> tuple[np.ndarray, np.ndarray]:
        """``(C, s)`` with the characteristic ``{x : C x = s}`` in local order."""
        return _stamp(self)

    def characteristic(self, tol: float = TOL) -> AffineSpace:
        c, s = self.constraints()
        a = AffineSpace.from_constraints(self.labels, c, s, tol)
        if isinstance(a, Void):  # rows are checked independent, so unreachable
            raise DeviceError("device constraints are inconsistent")
        return a

    def homogeneous(self) -> "Device":
        """Same device with every source set to zero."""
        zeros = {k: None for k in SOURCE_PARAMS.get(self.kind, ())}
        if not zeros:
            return self
        return Device(self.kind, self.edges, {**self.params, **zeros})

    def is_homogeneous(self) -> bool:
        return all(not np.any(self.params[k]) for k in SOURCE_PARAMS.get(self.kind, ()))

    def renamed(self, prefix: str) -> "Device":
        return Device(self.kind, tuple(prefix + e for e in self.edges), self.params)


def _edges(edges) -> tuple[str, ...]:
    return (edges,) if isinstance(edges, str) else tuple(edges)


def _independent(c: np.ndarray, name: str) -> None:
    if c.shape[0] and rank_of(np.linalg.svd(c, compute_uv=False), c.shape) < c.shape[0]:
        raise DeviceError(f"{name} constraint rows are linearly dependent")


def _normalize(kind: DeviceKind, k: int, p: dict) -> dict:
    out: dict = {}
    if kind is K.IMPEDANCE:
        out["Z"] = _mat(p.get("Z"), (k, k), "Z")
        out["E"] = _vec(p.get("E"), k, "E")
    elif kind is K.ADMITTANCE:
        out["Y"] = _mat(p.get("Y"), (k, k), "Y")
        out["J"] = _vec(p.get("J"), k, "J")
    elif kind is K.HYBRID:
        g11 = np.atleast_2d(np.array(p.get("g11"), dtype=complex))
        k1 = g11.shape[0]
        k2 = k - k1
        out["g11"] = _mat(g11.reshape(k1, k1), (k1, k1), "g11")
        out["h12"] = _mat(np.array(p.get("h12"), dtype=complex).reshape(k1, k2), (k1, k2), "h12")
        out["h21"] = _mat(np.array(p.get("h21"), dtype=complex).reshape(k2, k1), (k2, k1), "h21")
        out["r22"] = _mat(np.array(p.get("r22"), dtype=complex).reshape(k2, k2), (k2, k2), "r22")
        out["J"] = _vec(p.get("J"), k1, "J")
        out["E"] = _vec(p.get("E"), k2, "E")
    elif kind is K.VSOURCE:
        out["E"] = _vec(p.get("E"), k, "E")
    elif kind is K.ISOURCE:
        out["J"] = _vec(p.get("J"), k, "J")
    elif kind in (K.NORATOR, K.NULLATOR):
        pass
    elif kind is K.GYRATOR:
        if k % 2:
            raise DeviceError("gyrator needs an even number of edges")
        m = k // 2
        r = np.array(p.get("R", 1.0) if p.get("R") is not None else 1.0, dtype=complex)
        if r.ndim == 2 and r.shape[0] == r.shape[1] and r.shape[0] > 1:
            if np.any(r - np.diag(np.diag(r))):
                raise DeviceError("gyrator R must be diagonal")
            r = np.diag(r)
        r = r.reshape(-1)
        r = np.full(m, r[0]) if r.size == 1 else r
        if r.shape != (m,) or np.any(np.abs(r.imag) > 0) or np.any(r.real <= 0):
            raise DeviceError("gyrator R must be a positive diagonal")
        out["R"] = _mat(r.real, (m,), "R")
        out["sv"] = _vec(p.get("sv"), m, "sv")
        out["si"] = _vec(p.get("si"), m, "si")
    elif kind is K.TRANSFORMER:
        if k % 2:
            raise DeviceError("transformer needs an even number of edges")
        n = np.array(p.get("n", 1.0) if p.get("n") is not None else 1.0, dtype=complex).reshape(-1)
        n = np.full(k // 2, n[0]) if n.size == 1 else n
        if np.any(n == 0):
            raise DeviceError("transformer ratio must be nonzero")
        out["n"] = _mat(n, (k // 2,), "n")
    elif kind in CONTROLLED:
        if k != 2:
            raise DeviceError(f"{kind.value} sits on exactly two edges (control, controlled)")
        name = {K.CCVS: "r", K.VCCS: "g", K.CCCS: "alpha", K.VCVS: "beta"}[kind]
        out[name] = _mat(complex(np.asarray(p.get(name), dtype=complex).reshape(-1)[0]), (), name)
    elif kind is K.GENERIC:
        b = np.atleast_2d(np.array(p.get("B"), dtype=complex))
        q = np.atleast_2d(np.array(p.get("Q"), dtype=complex))
        if b.size == 0:
            b = b.reshape(-1, k)
        if q.size == 0:
            q = q.reshape(-1, k)
        rows = b.shape[0]
        out["B"] = _mat(b, (rows, k), "B")
        out["Q"] = _mat(q, (rows, k), "Q")
        out["s"] = _vec(p.get("s"), rows, "s") if rows else _mat(np.zeros(0), (0,), "s")
        _independent(np.hstack([out["B"], -out["Q"]]), "generic (B|-Q)")
    return out


def _stamp(d: Device) -> tuple[np.ndarray, np.ndarray]:
    k = len(d.edges)
    p = d.params
    eye = np.eye(k)
    kind = d.kind
    if kind is K.IMPEDANCE:
        return np.hstack([eye, -p["Z"]]), np.array(p["E"])
    if kind is K.ADMITTANCE:
        return np.hstack([-p["Y"], eye]), np.array(p["J"])
    if kind is K.HYBRID:
        k1 = p["g11"].shape[0]
        c = np.zeros((k, 2 * k), dtype=complex)
        # i_1 - g11 v_1 - h12 i_2 = J
        c[:k1, :k1] = -p["g11"]
        c[:k1, k:k + k1] = np.eye(k1)
        c[:k1, k + k1:] = -p["h12"]
        # v_2 - h21 v_1 - r22 i_2 = E
        c[k1:, :k1] = -p["h21"]
        c[k1:, k1:k] = np.eye(k - k1)
        c[k1:, k + k1:] = -p["r22"]
        return c, np.concatenate([p["J"], p["E"]])
    if kind is K.VSOURCE:
        return np.hstack([eye, 0 * eye]), np.array(p["E"])
    if kind is K.ISOURCE:
        return np.hstack([0 * eye, eye]), np.array(p["J"])
    if kind is K.NORATOR:
        return np.zeros((0, 2 * k)), np.zeros(0)
    if kind is K.NULLATOR:
        return np.eye(2 * k), np.zeros(2 * k)
    if kind is K.GYRATOR:
        m = k // 2
        r = np.diag(p["R"])
        c = np.zeros((k, 2 * k), dtype=complex)
        # v_S + R i_Shat = sv ; v_Shat - R i_S = si
        c[:m, :m] = np.eye(m)
        c[:m, k + m:] = r
        c[m:, m:k] = np.eye(m)
        c[m:, k:k + m] = -r
        return c, np.concatenate([p["sv"], p["si"]])
    if kind is K.TRANSFORMER:
        m = k // 2
        n = np.diag(p["n"])
        c = np.zeros((k, 2 * k), dtype=complex)
        # v_1 = n v_2 ; i_2 = -n i_1
        c[:m, :m] = np.eye(m)
        c[:m, m:k] = -n
        c[m:, k:k + m] = n
        c[m:, k + m:] = np.eye(m)
        return c, np.zeros(k)
    if kind in CONTROLLED:
        # columns (v_c, v_d, i_c, i_d)
        c = np.zeros((2, 4), dtype=complex)
        if kind is K.CCVS:      # v_c = 0, v_d = r i_c
            c[0, 0] = 1
            c[1, 1], c[1, 2] = 1, -p["r"]
        elif kind is K.VCCS:    # i_c = 0, i_d = g v_c
            c[0, 2] = 1
            c[1, 0], c[1, 3] = -p["g"], 1
        elif kind is K.CCCS:    # v_c = 0, i_d = alpha i_c
            c[0, 0] = 1
            c[1, 2], c[1, 3] = -p["alpha"], 1
        else:                   # i_c = 0, v_d = beta v_c
            c[0, 2] = 1
            c[1, 0], c[1, 1] = -p["beta"], 1
        return c, np.zeros(2)
    if kind is K.GENERIC:
        return np.hstack([p["B"], -p["Q"]]), np.array(p["s"])
    raise DeviceError(f"unknown device kind {kind}")


def device_adjoint(d: Device, tol: float = TOL) -> Device:
    """Closed-form adjoint device; sources are dropped."""
    p = d.params
    kind = d.kind
    h = lambda a: np.conj(a).T  # noqa: E731
    if kind is K.IMPEDANCE:
        return Device.impedance(d.edges, h(p["Z"]))
    if kind is K.ADMITTANCE:
        return Device.admittance(d.edges, h(p["Y"]))
    if kind is K.HYBRID:
        return Device.hybrid(d.edges, h(p["g11"]), -h(p["h21"]), -h(p["h12"]), h(p["r22"]))
    if kind is K.VSOURCE:
        return Device.vsource(d.edges, np.zeros(len(d.edges)))
    if kind is K.ISOURCE:
        return Device.isource(d.edges, np.zeros(len(d.edges)))
    if kind is K.NORATOR:
        return Device.nullator(d.edges)
    if kind is K.NULLATOR:
        return Device.norator(d.edges)
    if kind is K.GYRATOR:
        m = len(d.edges) // 2
        return Device.gyrator(d.edges[m:] + d.edges[:m], p["R"])
    if kind is K.TRANSFORMER:
        return Device.transformer(d.edges, np.conj(p["n"]))
    c, dd = d.edges
    if kind is K.CCVS:
        return Device.ccvs(dd, c, np.conj(p["r"]))
    if kind is K.VCCS:
        return Device.vccs(dd, c, np.conj(p["g"]))
    if kind is K.CCCS:
        return Device.vcvs(dd, c, -np.conj(p["alpha"]))
    if kind is K.VCVS:
        return Device.cccs(dd, c, -np.conj(p["beta"]))
    if kind is K.GENERIC:
        v = adjoint(d.characteristic(tol), tol)
        cons = v.constraints(tol)
        # back into local order (v_1..v_k, i_1..i_k)
        local = v.index.positions(d.labels)
        cons = cons[:, local]
        k = len(d.edges)
        return Device.generic(d.edges, cons[:, :k], -cons[:, k:])
    raise DeviceError(f"unknown device kind {kind}")


def assemble_characteristic(devices: Sequence[Device], edges: Iterable[str] | None = None,
                            tol: float = TOL):
    """Direct sum of the device characteristics.

    If ``edges`` is given the device edge sets must partition it exactly.
    """
    seen: dict[str, Device] = {}
    for d in devices:
        for e in d.edges:
            if e in seen:
                raise DeviceError(f"edge {e} carries two devices")
            seen[e] = d
    if edges is not None:
        edges = set(edges)
        missing = edges - set(seen)
        extra = set(seen) - edges
        if missing:
            raise DeviceError(f"edges without a device: {sorted(missing)}")
        if extra:
            raise DeviceError(f"devices on unknown edges: {sorted(extra)}")
    if not devices:
        return AffineSpace.of(Subspace.zero(IndexSet()))
    return direct_sum(*(d.characteristic(tol) for d in devices))


def is_passive_impedance(d: Device, strict: bool = False, tol: float = 1e-12) -> bool:
    """Whether an impedance device has ``Z + Z*`` PSD (or PD when ``strict``)."""
    if d.kind is not K.IMPEDANCE:
        return False
    w = np.linalg.eigvalsh(d.params["Z"] + d.params["Z"].conj().T)
    return bool(w.min() > tol) if strict else bool(w.min() >= -tol)
