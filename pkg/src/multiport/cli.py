"""Command-line driver: ``multiport <command> <netlist> [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional, Sequence

import numpy as np

from .behaviour import NotRigid, PortBehaviour, Status, extract_port_behaviour, solve_unique
from .devices import Device
from .netlist import NetlistError, emit, load
from .network import Multiport, adjoint_multiport, rigidity
from .power import analyze_power
from .subspace import TOL, complex_to_json

EXIT_OK = 0
EXIT_NOT_RIGID = 2
EXIT_INCONSISTENT = 3
EXIT_PARSE = 4


def _fmt(z: complex) -> str:
    z = complex(z)
    re_, im = z.real + 0.0, z.imag + 0.0
    if im == 0.0:
        return repr(re_)
    return f"{re_!r}{'+' if im >= 0 else '-'}{abs(im)!r}i"


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


class _Failure(Exception):
    def __init__(self, code: int, payload: dict):
        super().__init__(payload.get("message", ""))
        self.code = code
        self.payload = payload


def _not_rigid(exc: NotRigid) -> _Failure:
    code = EXIT_INCONSISTENT if exc.status is Status.INCONSISTENT else EXIT_NOT_RIGID
    kind = "inconsistent" if code == EXIT_INCONSISTENT else "not-rigid"
    return _Failure(code, {"error": kind, "message": str(exc)})


# -- renderers ----------------------------------------------------------------

def _behaviour_text(b: PortBehaviour) -> str:
    bm, qm, s = b.matrices()
    kind, p1 = b.representation()
    lines = [f"ports: {' '.join(b.ports)}", f"equations: {bm.shape[0]}  (B v - Q i = s)"]
    cols = [str(lab) for lab in b.labels]
    lines.append("columns: " + " ".join(cols) + " | s")
    aug = np.hstack([bm, -qm, s.reshape(-1, 1)])
    for row in aug:
        lines.append("  " + " ".join(_fmt(z) for z in row[:-1]) + " | " + _fmt(row[-1]))
    rep = kind if kind != "hybrid" else f"hybrid (currents of {' '.join(p1)} in terms of voltages)"
    lines.append(f"representation: {rep}")
    th = b.thevenin()
    if th is not None and b.n_ports:
        z, e = th
        lines.append("thevenin: v = Z i + E")
        for k in range(b.n_ports):
            lines.append("  Z[" + " ".join(_fmt(x) for x in z[k]) + "]  E " + _fmt(e[k]))
    return "\n".join(lines) + "\n"


def _behaviour_csv(b: PortBehaviour) -> str:
    bm, qm, s = b.matrices()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([str(lab) for lab in b.labels] + ["s"])
    for row in np.hstack([bm, -qm, s.reshape(-1, 1)]):
        w.writerow([_fmt(z) for z in row])
    return buf.getvalue()


def _report_text(r, cross=None) -> str:
    d = r.to_json()
    lines = [f"classification: {d['classification']}"]
    if d["stationary_port"]:
        for p in r.ports:
            lines.append(f"  {p}: v = {_fmt(r.v[r.ports.index(p)])}  "
                         f"i = {_fmt(r.i[r.ports.index(p)])}")
        lines.append(f"power delivered (unscaled, <v,i>+<i,v>): {d['power_delivered']!r}")
        lines.append(f"power delivered (half-scaled): {d['power_delivered_half']!r}")
    lines.append(f"passivity: {d['passivity']}{' (marginal)' if d['marginal'] else ''}")
    lines.append(f"maximal: {d['maximal']}{' (unique maximizer)' if d['unique_maximizer'] else ''}")
    if cross is not None:
        lines.append(f"termination path agrees: {r.agrees(cross)}")
    return "\n".join(lines) + "\n"


def _report_csv(r) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["port", "v", "i"])
    if r.v is not None:
        for k, p in enumerate(r.ports):
            w.writerow([p, _fmt(r.v[k]), _fmt(r.i[k])])
    d = r.to_json()
    for key in ("classification", "power_delivered", "power_delivered_half", "passivity", "maximal"):
        w.writerow([key, d[key] if not isinstance(d[key], float) else repr(d[key]), ""])
    return buf.getvalue()


# -- commands -------------------------------------------------------------------

def cmd_port_behaviour(m: Multiport, args, tol: float) -> tuple[int, str]:
    try:
        b = extract_port_behaviour(m, tol)
    except NotRigid as exc:
        raise _not_rigid(exc) from None
    extra = {}
    if args.oracle:
        o = PortBehaviour.from_oracle(m, tol)
        res = b.residual(o)
        extra = {"oracle": {"agrees": bool(res <= 1e-7), "residual": float(res)}}
    if args.format == "json":
        return EXIT_OK, dumps({**b.to_json(), **extra})
    if args.format == "csv":
        return EXIT_OK, _behaviour_csv(b)
    text = _behaviour_text(b)
    if extra:
        text += f"oracle agrees: {extra['oracle']['agrees']} (residual {extra['oracle']['residual']:.3e})\n"
    return EXIT_OK, text


def cmd_rigidity(m: Multiport, args, tol: float) -> tuple[int, str]:
    v = rigidity(m, tol, dual=True)
    code = EXIT_OK if v.rigid else EXIT_NOT_RIGID
    d = v.to_json()
    if args.format == "json":
        return code, dumps(d)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rigid", "full_sum", "zero_intersection", "witness_kind"])
        w.writerow([v.rigid, v.full_sum, v.zero_intersection, v.witness_kind])
        return code, buf.getvalue()
    lines = [f"rigid: {v.rigid}", f"full sum: {v.full_sum}",
             f"zero intersection: {v.zero_intersection}"]
    if v.witness is not None:
        lines.append(f"witness ({v.witness_kind}):")
        for lab, z in zip(v.witness_index.labels, v.witness):
            if abs(z) > tol:
                lines.append(f"  {lab} = {_fmt(z)}")
    return code, "\n".join(lines) + "\n"


def cmd_adjoint(m: Multiport, args, tol: float) -> tuple[int, str]:
    text = emit(adjoint_multiport(m), comment="adjoint multiport")
    if args.format == "json":
        return EXIT_OK, dumps({"netlist": text})
    return EXIT_OK, text


def cmd_max_power(m: Multiport, args, tol: float) -> tuple[int, str]:
    try:
        r, cross = analyze_power(m, args.via, args.seed, tol)
    except NotRigid as exc:
        raise _not_rigid(exc) from None
    if args.format == "json":
        d = r.to_json()
        if cross is not None:
            d["cross_check"] = {**cross.to_json(), "agrees": r.agrees(cross)}
        return EXIT_OK, dumps(d)
    if args.format == "csv":
        return EXIT_OK, _report_csv(r)
    return EXIT_OK, _report_text(r, cross)


def cmd_solve(m: Multiport, args, tol: float) -> tuple[int, str]:
    if m.ports:
        # unterminated ports act as norators
        m = Multiport(m.graph, (), m.devices + (Device.norator(m.ports),))
    sol = solve_unique(m, tol)
    if sol.status is Status.INCONSISTENT:
        raise _Failure(EXIT_INCONSISTENT, {"error": "inconsistent",
                                           "message": "network equations are inconsistent"})
    if sol.status is Status.NON_UNIQUE:
        raise _Failure(EXIT_NOT_RIGID, {"error": "non-unique",
                                        "message": "network solution is not unique"})
    if args.format == "json":
        return EXIT_OK, dumps({"status": "unique", "solution": {
            str(lab): complex_to_json(z) for lab, z in zip(sol.index.labels, sol.x)}})
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "value"])
        for lab, z in zip(sol.index.labels, sol.x):
            w.writerow([str(lab), _fmt(z)])
        return EXIT_OK, buf.getvalue()
    return EXIT_OK, "".join(f"{lab} = {_fmt(z)}\n" for lab, z in zip(sol.index.labels, sol.x))


COMMANDS = {
    "port-behaviour": cmd_port_behaviour,
    "rigidity": cmd_rigidity,
    "adjoint": cmd_adjoint,
    "max-power": cmd_max_power,
    "solve": cmd_solve,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("netlist", help="netlist file, or - for stdin")
    common.add_argument("--tol", type=float, default=None,
                        help=f"relative rank tolerance (default: netlist option or {TOL:g})")
    common.add_argument("--format", choices=("json", "text", "csv"), default="text")
    common.add_argument("--out", default=None, help="write output to this file")
    common.add_argument("--seed", type=int, default=0, help="seed for perturbation sampling")

    p = argparse.ArgumentParser(prog="multiport",
                                description="Port behaviour and power transfer of linear multiports.")
    sub = p.add_subparsers(dest="command", required=True)
    pb = sub.add_parser("port-behaviour", parents=[common],
                        help="port behaviour by adjoint termination")
    pb.add_argument("--oracle", action="store_true",
                    help="cross-check against direct elimination")
    sub.add_parser("rigidity", parents=[common], help="rigidity verdict with witness")
    sub.add_parser("adjoint", parents=[common], help="emit the adjoint netlist")
    mp = sub.add_parser("max-power", parents=[common], help="stationary power transfer report")
    mp.add_argument("--via", choices=("behaviour", "termination", "both"), default="behaviour")
    sub.add_parser("solve", parents=[common], help="solve a network with ports left open")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    err_json = args.format == "json"
    try:
        m, net = load(args.netlist)
    except NetlistError as exc:
        if err_json:
            sys.stderr.write(dumps(exc.to_json()))
        else:
            sys.stderr.write(f"{args.netlist}: {exc}\n")
        return EXIT_PARSE
    except OSError as exc:
        payload = {"error": "io", "message": str(exc)}
        sys.stderr.write(dumps(payload) if err_json else f"{exc}\n")
        return EXIT_PARSE
    tol = args.tol if args.tol is not None else (net.tol or TOL)
    try:
        code, out = COMMANDS[args.command](m, args, tol)
    except _Failure as f:
        sys.stderr.write(dumps(f.payload) if err_json else f"{f.payload['message']}\n")
        return f.code
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
