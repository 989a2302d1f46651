"""Stationary power transfer and passivity of port behaviours.

Power follows the unscaled convention ``<v, i> + <i, v> = 2 Re <v, i>``
with currents entering the multiport; delivered power is its negative.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Literal, Optional

import numpy as np

from .behaviour import (
    PortBehaviour, Status, build_large_network, extract_port_behaviour, solve_unique,
)
from .devices import DeviceKind
from .graph import ports_contain_loop_or_cutset
from .network import Multiport
from .subspace import TOL, complex_to_json, ilabel, lstsq_consistent, vlabel


class Stationarity(str, enum.Enum):
    UNIQUE = "unique-stationary"
    NONE = "no-stationary"
    INFINITE = "infinite-stationary"


class Passivity(str, enum.Enum):
    STRICT = "strict"
    PASSIVE = "passive"
    NONE = "none"


class Maximality(str, enum.Enum):
    MAX = "max"
    MIN = "min"
    SADDLE = "saddle"
    UNKNOWN = "unknown"


def absorbed_power(v: np.ndarray, i: np.ndarray) -> float:
    """``<v, i> + <i, v>`` with entering currents."""
    return float(2.0 * np.real(np.vdot(i, v)))


def delivered_power(v: np.ndarray, i: np.ndarray) -> float:
    return -absorbed_power(v, i)


@dataclass(frozen=True, eq=False)
class PowerReport:
    classification: Stationarity
    ports: tuple[str, ...]
    v: Optional[np.ndarray] = None
    i: Optional[np.ndarray] = None
    passivity: Optional[Passivity] = None
    marginal: bool = False
    maximal: Maximality = Maximality.UNKNOWN
    unique_maximizer: bool = False
    via: str = ""

    @property
    def power_delivered(self) -> Optional[float]:
        if self.classification is not Stationarity.UNIQUE:
            return None
        return delivered_power(self.v, self.i)

    @property
    def power_delivered_half(self) -> Optional[float]:
        p = self.power_delivered
        return None if p is None else 0.5 * p

    def stationary_vector(self) -> Optional[np.ndarray]:
        if self.v is None:
            return None
        return np.concatenate([self.v, self.i])

    def agrees(self, other: "PowerReport", tol: float = 1e-6) -> bool:
        if self.classification is not other.classification:
            return False
        if self.classification is not Stationarity.UNIQUE:
            return True
        a, b = self.stationary_vector(), other.stationary_vector()
        return bool(np.linalg.norm(a - b) <= tol * max(1.0, np.linalg.norm(a)))

    def to_json(self) -> dict:
        out = {
            "classification": self.classification.value,
            "ports": list(self.ports),
            "stationary_port": None,
            "power_delivered": self.power_delivered,
            "power_delivered_half": self.power_delivered_half,
            "passivity": None if self.passivity is None else self.passivity.value,
            "marginal": self.marginal,
            "maximal": self.maximal.value,
            "unique_maximizer": self.unique_maximizer,
            "via": self.via,
        }
        if self.v is not None:
            out["stationary_port"] = {
                "v": {p: complex_to_json(z) for p, z in zip(self.ports, self.v)},
                "i": {p: complex_to_json(z) for p, z in zip(self.ports, self.i)},
            }
        return out


def stationarity_from_behaviour(b: PortBehaviour, tol: float = TOL) -> PowerReport:
    """Solve ``-(B Q* + Q B*) lam = s``; the stationary point is ``v = -Q* lam, i = B* lam``."""
    bm, qm, s = b.matrices()
    m = -(bm @ qm.conj().T + qm @ bm.conj().T)
    n = b.n_ports
    if m.shape[0] == 0:
        return PowerReport(Stationarity.UNIQUE, b.ports, np.zeros(n, complex), np.zeros(n, complex),
                           via="behaviour")
    # M is a product of (B | -Q) with itself, so its own norm is no guide to noise
    c_norm = np.linalg.norm(np.hstack([bm, qm]), 2)
    lam, ok, r = lstsq_consistent(m, s, tol, scale=c_norm ** 2)
    if not ok:
        return PowerReport(Stationarity.NONE, b.ports, via="behaviour")
    if r < m.shape[0]:
        return PowerReport(Stationarity.INFINITE, b.ports, via="behaviour")
    return PowerReport(Stationarity.UNIQUE, b.ports, -qm.conj().T @ lam, bm.conj().T @ lam,
                       via="behaviour")


def stationarity_by_termination(m: Multiport, tol: float = TOL) -> PowerReport:
    """Terminate ``m`` by its adjoint through ideal 1:1 transformers and solve."""
    net = build_large_network(m, "transformer")
    sol = solve_unique(net, tol)
    if sol.status is Status.INCONSISTENT:
        return PowerReport(Stationarity.NONE, m.ports, via="termination")
    if sol.status is Status.NON_UNIQUE:
        return PowerReport(Stationarity.INFINITE, m.ports, via="termination")
    v = np.array([sol.value(vlabel(p)) for p in m.ports], dtype=complex)
    i = -np.array([sol.value(ilabel(p)) for p in m.ports], dtype=complex)
    return PowerReport(Stationarity.UNIQUE, m.ports, v, i, via="termination")


def hermitian_form(b: PortBehaviour) -> np.ndarray:
    """``H`` with absorbed power ``a^T H conj(a)`` for ``x = a^T W`` on the translate basis ``W``."""
    w = b.translate_basis()
    n = b.n_ports
    wv, wi = w[:, :n], w[:, n:]
    h = wv @ wi.conj().T + wi @ wv.conj().T
    return 0.5 * (h + h.conj().T)


def passivity_class(b: PortBehaviour, tau: float = TOL) -> tuple[Passivity, bool]:
    """``(class, marginal)`` from the extreme eigenvalue of the Hermitian power form.

    The translate basis is orthonormal, so the thresholds scale with ``max(1, |H|)``.
    ``marginal`` is set when the smallest eigenvalue sits between the two thresholds.
    """
    h = hermitian_form(b)
    if h.shape[0] == 0:
        return Passivity.STRICT, False
    w = np.linalg.eigvalsh(h)
    scale = max(1.0, float(np.abs(w).max()))
    lo = float(w.min())
    if lo >= 10 * tau * scale:
        return Passivity.STRICT, False
    if lo >= -tau * scale:
        return Passivity.PASSIVE, lo > tau * scale
    return Passivity.NONE, False


def device_passivity(m: Multiport, tol: float = 1e-12) -> Optional[Passivity]:
    """Passivity guaranteed by the devices when all of them are impedances.

    Strictness also requires that the ports contain no loop or cutset.
    Returns None when some device is not an impedance.
    """
    if any(d.kind is not DeviceKind.IMPEDANCE for d in m.devices):
        return None
    lo = min((np.linalg.eigvalsh(d.params["Z"] + d.params["Z"].conj().T).min()
              for d in m.devices), default=np.inf)
    if lo < -tol:
        return Passivity.NONE
    if lo > tol and ports_contain_loop_or_cutset(m.graph, m.ports) == "no":
        return Passivity.STRICT
    return Passivity.PASSIVE


def maximality_upgrade(r: PowerReport, b: PortBehaviour, passivity: Passivity,
                       marginal: bool = False, seed: int = 0, n_random: int = 50,
                       tol: float = 1e-9) -> PowerReport:
    """Attach passivity and decide whether the stationary point maximizes delivered power.

    Passive behaviours make delivered power concave on the translate, so any
    stationary point is a maximum (unique when strict).  Otherwise each signed
    basis direction and ``n_random`` seeded random directions are tried.
    """
    r = replace(r, passivity=passivity, marginal=marginal)
    if passivity is not Passivity.NONE:
        if r.classification is Stationarity.NONE:
            return r
        return replace(r, maximal=Maximality.MAX,
                       unique_maximizer=passivity is Passivity.STRICT
                       and r.classification is Stationarity.UNIQUE)
    if r.classification is not Stationarity.UNIQUE:
        return r
    w = b.translate_basis()
    if w.shape[0] == 0:
        return replace(r, maximal=Maximality.MAX, unique_maximizer=True)
    rng = np.random.default_rng(seed)
    dirs = [sgn * row for row in w for sgn in (1.0, -1.0)]
    for _ in range(n_random):
        a = rng.normal(size=w.shape[0]) + 1j * rng.normal(size=w.shape[0])
        dirs.append(a @ w / np.linalg.norm(a))
    n = b.n_ports
    x0 = r.stationary_vector()
    step = max(1.0, float(np.linalg.norm(x0)))
    p0 = delivered_power(x0[:n], x0[n:])
    up = down = False
    for d in dirs:
        x = x0 + step * d
        diff = delivered_power(x[:n], x[n:]) - p0
        if diff > tol * step * step:
            up = True
        elif diff < -tol * step * step:
            down = True
    if up and down:
        verdict = Maximality.SADDLE
    elif down:
        verdict = Maximality.MAX
    elif up:
        verdict = Maximality.MIN
    else:
        verdict = Maximality.UNKNOWN
    return replace(r, maximal=verdict)


def analyze_power(m: Multiport, via: Literal["behaviour", "termination", "both"] = "behaviour",
                  seed: int = 0, tol: float = TOL) -> tuple[PowerReport, Optional[PowerReport]]:
    """Full power report for a rigid multiport.

    Returns ``(report, cross)`` where ``cross`` is the termination-path report
    when ``via="both"``.  Raises :class:`NotRigid` if extraction fails.
    """
    b = extract_port_behaviour(m, tol)
    cls, marginal = passivity_class(b, tol)
    if via == "termination":
        r = stationarity_by_termination(m, tol)
    else:
        r = stationarity_from_behaviour(b, tol)
    r = maximality_upgrade(r, b, cls, marginal, seed)
    cross = None
    if via == "both":
        cross = maximality_upgrade(stationarity_by_termination(m, tol), b, cls, marginal, seed)
    return r, cross


def stationary_membership(r: PowerReport, b: PortBehaviour, adjoint_b: PortBehaviour) -> float:
    """Distance of the stationary point from ``A ∩ (V_adj)_{P(-P")}``."""
    from .subspace import intersection, sign_flip

    x = r.stationary_vector()
    order = b._order()
    full = np.empty_like(x)
    full[order] = x
    adj = sign_flip(adjoint_b.space.translate, b.space.index.currents())
    both = intersection(b.space, adj)
    if not hasattr(both, "distance"):
        return float("inf")
    return both.distance(full) / max(1.0, float(np.linalg.norm(full)))
