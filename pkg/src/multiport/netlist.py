"""Line-oriented netlist format (``.mp``).

::

    # comment
    node n1
    edge e1 n1 n2
    edge r1 n2 n3
    edge p1 n1 n3
    port p1
    device vsource 10 on e1
    device impedance 5 on r1
    option tol 1e-10

Device parameters are positional in the order listed in :data:`PARAMS`, or
``name=value``.  A value is a complex literal (``2``, ``-1.5e3``, ``2+3i``,
``2-3i``, ``4i``) or a ``matrix [rows cols; v11 v12 ...]`` in row-major order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .devices import Device, DeviceError, DeviceKind
from .graph import Digraph
from .network import Multiport

PARAMS: dict[DeviceKind, tuple[str, ...]] = {
    DeviceKind.IMPEDANCE: ("Z", "E"),
    DeviceKind.ADMITTANCE: ("Y", "J"),
    DeviceKind.HYBRID: ("g11", "h12", "h21", "r22", "J", "E"),
    DeviceKind.VSOURCE: ("E",),
    DeviceKind.ISOURCE: ("J",),
    DeviceKind.NORATOR: (),
    DeviceKind.NULLATOR: (),
    DeviceKind.GYRATOR: ("R", "sv", "si"),
    DeviceKind.TRANSFORMER: ("n",),
    DeviceKind.CCVS: ("r",),
    DeviceKind.VCCS: ("g",),
    DeviceKind.CCCS: ("alpha",),
    DeviceKind.VCVS: ("beta",),
    DeviceKind.GENERIC: ("B", "Q", "s"),
}

REQUIRED: dict[DeviceKind, int] = {
    DeviceKind.IMPEDANCE: 1, DeviceKind.ADMITTANCE: 1, DeviceKind.HYBRID: 4,
    DeviceKind.VSOURCE: 1, DeviceKind.ISOURCE: 1, DeviceKind.CCVS: 1, DeviceKind.VCCS: 1,
    DeviceKind.CCCS: 1, DeviceKind.VCVS: 1, DeviceKind.GENERIC: 2,
}

_TOKEN = re.compile(r"\s*(?:(#.*)|(\[|\]|;|=)|([^\s\[\];=#]+))")
_REAL = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_RE_ONLY = re.compile(rf"^[+-]?{_REAL}$")
_IM_ONLY = re.compile(rf"^(?P<im>[+-]?(?:{_REAL})?)[ij]$")
_BOTH = re.compile(rf"^(?P<re>[+-]?{_REAL})(?P<im>[+-](?:{_REAL})?)[ij]$")
_NAME = re.compile(r"^[A-Za-z_~][A-Za-z0-9_.~:-]*$")


class NetlistError(Exception):
    """Base class carrying a source location."""

    kind = "error"

    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)
        self.message = message
        self.line = line
        self.column = column

    def to_json(self) -> dict:
        return {"error": self.kind, "message": self.message, "line": self.line,
                "column": self.column}


class ParseError(NetlistError):
    kind = "parse"


class SemanticError(NetlistError):
    kind = "semantic"


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int


def _tokens(line: str, lineno: int) -> list[Token]:
    out = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if m is None or m.end() == pos:
            if line[pos:].strip():
                raise ParseError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
            break
        if m.group(1) is not None:
            break
        text = m.group(2) or m.group(3)
        if text:
            out.append(Token(text, lineno, m.start(2 if m.group(2) else 3) + 1))
        pos = m.end()
    return out


def parse_complex(tok: Token) -> complex:
    text = tok.text
    if _RE_ONLY.match(text):
        return complex(float(text), 0.0)
    m = _IM_ONLY.match(text) or _BOTH.match(text)
    if m is None:
        raise ParseError(f"malformed number {text!r}", tok.line, tok.column)
    im = m.group("im")
    im = float(im + "1") if im in ("", "+", "-") else float(im)
    re_ = float(m.group("re")) if "re" in m.groupdict() and m.group("re") else 0.0
    return complex(re_, im)


class _Cursor:
    def __init__(self, tokens: list[Token], line: int):
        self.tokens = tokens
        self.k = 0
        self.line = line

    def peek(self) -> Optional[Token]:
        return self.tokens[self.k] if self.k < len(self.tokens) else None

    def next(self, what: str = "token") -> Token:
        t = self.peek()
        if t is None:
            col = (self.tokens[-1].column + len(self.tokens[-1].text)) if self.tokens else 1
            raise ParseError(f"expected {what}", self.line, col)
        self.k += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.next(repr(text))
        if t.text != text:
            raise ParseError(f"expected {text!r}, got {t.text!r}", t.line, t.column)
        return t

    def done(self) -> bool:
        return self.k >= len(self.tokens)


def _parse_value(cur: _Cursor):
    t = cur.next("value")
    if t.text != "matrix":
        return parse_complex(t)
    cur.expect("[")
    r_tok, c_tok = cur.next("row count"), cur.next("column count")
    try:
        rows, cols = int(r_tok.text), int(c_tok.text)
    except ValueError:
        bad = r_tok if not r_tok.text.isdigit() else c_tok
        raise ParseError("matrix dimensions must be integers", bad.line, bad.column) from None
    cur.expect(";")
    vals = []
    while True:
        t = cur.next("matrix entry or ']'")
        if t.text == "]":
            break
        if t.text == ";":
            continue
        vals.append(parse_complex(t))
    if len(vals) != rows * cols:
        raise ParseError(f"matrix [{rows} {cols}] needs {rows * cols} entries, got {len(vals)}",
                         r_tok.line, r_tok.column)
    return np.array(vals, dtype=complex).reshape(rows, cols)


def _name(t: Token, what: str) -> str:
    if not _NAME.match(t.text):
        raise ParseError(f"invalid {what} name {t.text!r}", t.line, t.column)
    return t.text


@dataclass
class DeviceStatement:
    kind: DeviceKind
    params: dict
    edges: tuple[str, ...]
    line: int
    column: int


@dataclass
class Netlist:
    nodes: list[str] = field(default_factory=list)
    edges: list[tuple[str, str, str]] = field(default_factory=list)
    ports: list[str] = field(default_factory=list)
    devices: list[DeviceStatement] = field(default_factory=list)
    options: dict = field(default_factory=dict)
    locations: dict = field(default_factory=dict)

    @property
    def tol(self) -> Optional[float]:
        return self.options.get("tol")

    def to_multiport(self) -> Multiport:
        g = Digraph.from_edges(self.edges, self.nodes)
        known = {e[0] for e in self.edges}
        owner: dict[str, int] = {}
        devices = []
        for st in self.devices:
            for e in st.edges:
                if e not in known:
                    raise SemanticError(f"device on unknown edge {e!r}", st.line, st.column)
                if e in owner:
                    raise SemanticError(f"edge {e!r} already carries a device (line {owner[e]})",
                                        st.line, st.column)
                if e in self.ports:
                    raise SemanticError(f"port edge {e!r} cannot carry a device", st.line, st.column)
                owner[e] = st.line
            try:
                if st.kind is DeviceKind.GYRATOR and st.params.get("R") is not None:
                    r = np.asarray(st.params["R"])
                    if np.any(np.abs(r.imag) > 0):
                        raise DeviceError("gyrator R must be real")
                devices.append(Device(st.kind, st.edges, st.params))
            except (DeviceError, ValueError, TypeError) as exc:
                raise SemanticError(str(exc), st.line, st.column) from None
        for e in known - set(owner) - set(self.ports):
            line, col = self.locations.get(("edge", e), (0, 0))
            raise SemanticError(f"edge {e!r} has no device and is not a port", line, col)
        return Multiport(g, tuple(self.ports), tuple(devices))


def parse(text: str) -> Netlist:
    """Parse netlist text.  Raises :class:`ParseError` or :class:`SemanticError`."""
    net = Netlist()
    edge_names: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw, lineno)
        if not toks:
            continue
        cur = _Cursor(toks, lineno)
        head = cur.next()
        kw = head.text
        if kw == "node":
            name = _name(cur.next("node name"), "node")
            if name in net.nodes:
                raise SemanticError(f"node {name!r} declared twice", lineno, head.column)
            net.nodes.append(name)
        elif kw == "edge":
            name = _name(cur.next("edge name"), "edge")
            tail = _name(cur.next("tail node"), "node")
            hd = _name(cur.next("head node"), "node")
            if name in edge_names:
                raise SemanticError(f"edge {name!r} declared twice", lineno, head.column)
            edge_names.add(name)
            net.edges.append((name, tail, hd))
            net.locations[("edge", name)] = (lineno, head.column)
        elif kw == "port":
            if cur.done():
                raise ParseError("port needs at least one edge", lineno, head.column + 4)
            while not cur.done():
                t = cur.next()
                name = _name(t, "edge")
                if name not in edge_names:
                    raise SemanticError(f"port on unknown edge {name!r}", t.line, t.column)
                if name in net.ports:
                    raise SemanticError(f"edge {name!r} is already a port", t.line, t.column)
                net.ports.append(name)
        elif kw == "device":
            net.devices.append(_parse_device(cur, head))
        elif kw == "option":
            key = cur.next("option name")
            if key.text != "tol":
                raise ParseError(f"unknown option {key.text!r}", key.line, key.column)
            val = cur.next("tolerance")
            try:
                tol = float(val.text)
            except ValueError:
                raise ParseError(f"malformed tolerance {val.text!r}", val.line, val.column) from None
            if not tol > 0:
                raise ParseError("tolerance must be positive", val.line, val.column)
            net.options["tol"] = tol
        else:
            raise ParseError(f"unknown statement {kw!r}", lineno, head.column)
        if not cur.done():
            t = cur.peek()
            raise ParseError(f"unexpected token {t.text!r}", t.line, t.column)
    return net


def _parse_device(cur: _Cursor, head: Token) -> DeviceStatement:
    kt = cur.next("device kind")
    try:
        kind = DeviceKind(kt.text.lower())
    except ValueError:
        raise ParseError(f"unknown device kind {kt.text!r}", kt.line, kt.column) from None
    names = PARAMS[kind]
    params: dict = {}
    positional = 0
    while True:
        t = cur.peek()
        if t is None:
            raise ParseError("expected 'on' followed by edges", cur.line,
                             cur.tokens[-1].column + len(cur.tokens[-1].text))
        if t.text == "on":
            cur.next()
            break
        nxt = cur.tokens[cur.k + 1] if cur.k + 1 < len(cur.tokens) else None
        if nxt is not None and nxt.text == "=":
            key = cur.next()
            cur.next()
            if key.text not in names:
                raise ParseError(f"{kind.value} has no parameter {key.text!r}", key.line, key.column)
            if key.text in params:
                raise ParseError(f"parameter {key.text!r} given twice", key.line, key.column)
            params[key.text] = _parse_value(cur)
        else:
            if positional >= len(names):
                raise ParseError(f"too many parameters for {kind.value}", t.line, t.column)
            while positional < len(names) and names[positional] in params:
                positional += 1
            params[names[positional]] = _parse_value(cur)
            positional += 1
    edges = []
    while not cur.done():
        edges.append(_name(cur.next(), "edge"))
    if not edges:
        raise ParseError("device needs at least one edge after 'on'", cur.line,
                         cur.tokens[-1].column)
    missing = [n for n in names[:REQUIRED.get(kind, 0)] if n not in params]
    if missing:
        raise ParseError(f"{kind.value} is missing parameter {missing[0]!r}", kt.line, kt.column)
    if kind in (DeviceKind.CCVS, DeviceKind.VCCS, DeviceKind.CCCS, DeviceKind.VCVS) and len(edges) != 2:
        raise SemanticError(f"{kind.value} needs a controlling and a controlled edge",
                            head.line, head.column)
    return DeviceStatement(kind, params, tuple(edges), head.line, head.column)


# --------------------------------------------------------------------------
# emission
# --------------------------------------------------------------------------

def format_complex(z: complex) -> str:
    """Shortest round-trip literal in netlist syntax."""
    z = complex(z)
    re_, im = z.real + 0.0, z.imag + 0.0
    if im == 0.0:
        return repr(re_)
    if re_ == 0.0:
        return f"{im!r}i"
    sign = "+" if im >= 0 else "-"
    return f"{re_!r}{sign}{abs(im)!r}i"


def format_value(a) -> str:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return format_complex(complex(a))
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    body = " ".join(format_complex(z) for z in a.reshape(-1))
    return f"matrix [{a.shape[0]} {a.shape[1]}; {body}]"


def _is_zero(a) -> bool:
    return not np.any(np.asarray(a))


def emit_device(d: Device) -> str:
    names = PARAMS[d.kind]
    parts = ["device", d.kind.value]
    for name in names:
        val = d.params[name]
        if name in ("E", "J", "sv", "si", "s") and _is_zero(val) and name not in names[:REQUIRED.get(d.kind, 0)]:
            continue
        if d.kind is DeviceKind.GYRATOR and name == "R" and np.allclose(val, 1.0, atol=0, rtol=0):
            continue
        if d.kind is DeviceKind.TRANSFORMER and np.all(np.asarray(val) == 1.0):
            continue
        v = np.asarray(val)
        if v.ndim == 1 and v.size == 1:
            v = v[0]
        if v.ndim == 2 and v.shape == (1, 1) and d.kind not in (DeviceKind.HYBRID, DeviceKind.GENERIC):
            v = v[0, 0]
        parts.append(f"{name}={format_value(v)}")
    parts.append("on")
    parts.extend(d.edges)
    return " ".join(parts)


def emit(m: Multiport, tol: Optional[float] = None, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.extend(f"node {n}" for n in m.graph.nodes)
    lines.extend(f"edge {a} {t} {h}" for a, t, h in m.graph.edges)
    if m.ports:
        lines.append("port " + " ".join(m.ports))
    lines.extend(emit_device(d) for d in m.devices)
    if tol is not None:
        lines.append(f"option tol {tol!r}")
    return "\n".join(lines) + "\n"


def load(path: str) -> tuple[Multiport, Netlist]:
    import sys

    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    net = parse(text)
    return net.to_multiport(), net
