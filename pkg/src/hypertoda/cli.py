"""Command-line front end.

Coordinates
-----------
``--lambda`` takes the pairings (lambda, alpha_i^vee) over the simple roots
alpha_i of B, as complex literals ``<float>[+|-]<float>i`` separated by
commas (a plain ``<float>`` is also accepted).  ``--point`` takes the values
alpha_i(log a) over B.

Sign convention: the Harish-Chandra side (``f``, ``phi``, ``psi-cm``) lives
on the positive chamber, every coordinate > 0.  The Toda side
(``psi-toda``, ``whittaker``) accepts any real point; its series converges
everywhere and is best conditioned for coordinates <= 0, where the potential
e^{alpha(log a)} is small.

Output
------
JSON (default): ``{command, params, value | rows, errors}``.  CSV for sweeps:
columns ``M, lhs_re, lhs_im, rhs_re, rhs_im, rel_err, tail_est``; for single
values: ``re, im, tail_est``.  Numbers use 17 significant digits.

Exit codes: 0 success, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import assemble, factors, series
from .errors import ConfigurationError, NumericalError
from .rootsystem import build_root_system, parse_label

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

EVAL_KINDS = ("f", "phi", "psi-cm", "psi-toda", "whittaker", "c-function", "f-factor")
CHAMBER_KINDS = ("f", "phi", "psi-cm")
LIMIT_KINDS = ("cm-toda", "main", "cfunction", "hamiltonian")
SWEEP_COLUMNS = ("M", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_err", "tail_est")

_FLOAT = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"^(?P<re>[+-]?{_FLOAT})(?:(?P<im>[+-]{_FLOAT})i)?$")


class UsageError(Exception):
    """Invalid command line; maps to exit code 2."""


def parse_complex(text: str) -> complex:
    m = _COMPLEX.match(text)
    if not m:
        raise UsageError(f"malformed complex literal {text!r} (expected <float>[+|-]<float>i)")
    im = m.group("im")
    return complex(float(m.group("re")), float(im) if im else 0.0)


def parse_real_list(text: str, flag: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated reals, got {text!r}") from None


def parse_m_range(text: str) -> list[float]:
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"--m-range: expected start:stop[:step], got {text!r}") from None
    if len(nums) == 1:
        start = stop = nums[0]
        step = 1.0
    elif len(nums) in (2, 3):
        start, stop = nums[0], nums[1]
        step = nums[2] if len(nums) == 3 else 1.0
    else:
        raise UsageError(f"--m-range: expected start:stop[:step], got {text!r}")
    if step <= 0 or start <= 0 or stop < start:
        raise UsageError("--m-range needs 0 < start <= stop and a positive step")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


@dataclass
class Request:
    command: str
    kind: str | None = None
    rs_label: str = "A1"
    lam: list[complex] = field(default_factory=list)
    point: list[float] = field(default_factory=list)
    k: list[float] = field(default_factory=lambda: [0.5])
    l: list[float] | None = None
    trunc: int = 40
    m_values: list[float] = field(default_factory=list)
    route: str = "delta-phi"
    h: float = 1e-3
    fmt: str = "json"

    def params(self) -> dict:
        out = {"type": self.rs_label}
        if self.command == "roots":
            return out
        out["lambda"] = [_complex_json(v) for v in self.lam]
        if self.kind != "cfunction":
            out["point"] = list(self.point)
        if self.kind in ("f", "phi", "psi-cm", "c-function"):
            out["k"] = list(self.k)
        if self.kind in ("psi-toda", "whittaker"):
            out["l"] = list(self.l) if self.l is not None else None
        if self.kind not in ("c-function", "f-factor", "cfunction", "hamiltonian"):
            out["trunc"] = self.trunc
        if self.command == "limit":
            out["m"] = list(self.m_values)
            if self.kind == "cm-toda":
                out["route"] = self.route
            if self.kind == "hamiltonian":
                out["h"] = self.h
        return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="hypertoda",
        description="Hypergeometric and Whittaker functions of root systems and their limit transition.",
        epilog=(
            "CSV sweep columns: " + ", ".join(SWEEP_COLUMNS)
            + ". CSV value columns: re, im, tail_est. Exit codes: 0 ok, 2 usage, 3 numerical."
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, lam=True, point=True):
        sp.add_argument("--type", required=True, help="root system label, e.g. A2, B3, G2")
        if lam:
            sp.add_argument("--lambda", dest="lam", required=True,
                            help="pairings (lambda, alpha_i^vee), e.g. 0.9+0.31i,1.3-0.27i")
        if point:
            sp.add_argument("--point", help="alpha_i(log a) over B, comma-separated")
        sp.add_argument("--k", help="multiplicity: one value, or short,long")
        sp.add_argument("--l", help="character parameters l_alpha > 0 over B")
        sp.add_argument("--trunc", type=int, default=40, help="series height N (default 40)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    ev = sub.add_parser("eval", help="evaluate one function")
    ev.add_argument("kind", choices=EVAL_KINDS)
    common(ev)

    lim = sub.add_parser("limit", help="run a limit sweep over M")
    lim.add_argument("kind", choices=LIMIT_KINDS)
    common(lim)
    lim.add_argument("--m-range", default="2:6", help="start:stop[:step] (default 2:6)")
    lim.add_argument("--route", choices=("delta-phi", "scaled"), default="delta-phi",
                     help="cm-toda only: evaluate the left side via delta^{1/2} Phi or the rescaled series")
    lim.add_argument("--h", type=float, default=1e-3, help="hamiltonian only: finite-difference step")

    roots = sub.add_parser("roots", help="root-system facts")
    roots.add_argument("kind", choices=("info",))
    roots.add_argument("--type", required=True)
    roots.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def parse(argv: list[str]) -> Request:
    ns = build_parser().parse_args(argv)
    try:
        family, rank = parse_label(ns.type)
        rs = build_root_system(family, rank)
    except (ConfigurationError, ValueError) as exc:
        raise UsageError(f"--type: {exc}") from None
    req = Request(command=ns.command, kind=ns.kind, rs_label=rs.label, fmt=ns.format)
    if ns.command == "roots":
        return req

    req.lam = [parse_complex(v) for v in ns.lam.split(",")]
    if len(req.lam) != rank:
        raise UsageError(f"--lambda needs {rank} values for {rs.label}")
    if ns.trunc <= 0:
        raise UsageError("--trunc must be positive")
    req.trunc = ns.trunc

    needs_point = req.kind not in ("c-function", "f-factor", "cfunction")
    if needs_point:
        if ns.point is None:
            raise UsageError("--point is required")
        req.point = parse_real_list(ns.point, "--point")
        if len(req.point) != rank:
            raise UsageError(f"--point needs {rank} values for {rs.label}")
        if req.kind in CHAMBER_KINDS and any(v <= 0 for v in req.point):
            raise UsageError("--point must lie in the positive chamber (all coordinates > 0)")
        if req.kind == "hamiltonian" and any(v <= 0 for v in req.point):
            raise UsageError("--point must lie in the positive chamber for the Hamiltonian check")

    if ns.k is not None:
        req.k = parse_real_list(ns.k, "--k")
        if len(req.k) not in (1, 2) or any(v < 0 for v in req.k):
            raise UsageError("--k takes one or two non-negative values (short,long)")
    if ns.l is not None:
        req.l = parse_real_list(ns.l, "--l")
        if len(req.l) != rank or any(not v > 0 for v in req.l):
            raise UsageError(f"--l needs {rank} positive values (a zero gives a degenerate character)")

    if ns.command == "limit":
        req.m_values = parse_m_range(ns.m_range)
        req.route = ns.route
        if not ns.h > 0:
            raise UsageError("--h must be positive")
        req.h = ns.h
    return req


def _multiplicity(rs, k: list[float]):
    if len(k) == 1:
        return k[0]
    norms = sorted(set(int(n) for n in rs.root_norms))
    if len(norms) == 1:
        if k[0] != k[1]:
            raise UsageError(f"{rs.label} has one root length; give a single --k")
        return k[0]
    return {"short": k[0], "long": k[1]}


def _complex_json(z: complex) -> dict:
    return {"re": _num(z.real), "im": _num(z.imag)}


def _num(v: float):
    v = float(v)
    return None if math.isnan(v) else v


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _roots_info(rs) -> dict:
    w0 = rs.longest
    return {
        "label": rs.label,
        "rank": rs.rank,
        "n_positive_roots": int(rs.n_positive),
        "weyl_order": len(rs.weyl_group),
        "positive_roots": [list(map(int, r)) for r in rs.positive_roots],
        "root_norms": [int(n) for n in rs.root_norms],
        "sigma_rho_vee_pairings": [str(rs.sigma_rho_vee_pairing(r)) for r in rs.positive_roots],
        "rho_vee_pairings": [str(Fraction(rs.rho_vee_pairing(r))) for r in rs.positive_roots],
        "cartan": rs.cartan.tolist(),
        "gram": rs.gram.tolist(),
        "longest_word": list(w0.word),
    }


def _evaluate(req: Request, rs):
    lam = np.array(req.lam, dtype=complex)
    x = np.array(req.point, dtype=float)
    k = _multiplicity(rs, req.k)
    N = req.trunc
    if req.kind == "f":
        s = assemble.hypergeom_f_sum(rs, lam, k, x, N)
        return s.value, s.tail
    if req.kind == "phi":
        sv = series.phi(rs, lam, k, x, N)
        return sv.value, abs(math.exp(sv.log_scale.real)) * sv.tail
    if req.kind == "psi-cm":
        sv = series.psi_cm(rs, lam, k, x, N)
        return sv.value, math.exp(sv.log_scale.real) * sv.tail
    if req.kind == "psi-toda":
        sv = series.psi_toda(rs, lam, x, N, req.l)
        return sv.value, math.exp(sv.log_scale.real) * sv.tail
    if req.kind == "whittaker":
        s = assemble.whittaker_sum(rs, lam, x, N, req.l)
        scale = math.exp(rs.evaluate(rs.rho(), x).real)
        return assemble.whittaker_w(rs, lam, x, N, req.l), scale * s.tail
    if req.kind == "c-function":
        return factors.c_function(rs, lam, k), 0.0
    if req.kind == "f-factor":
        return factors.f_factor(rs, lam), 0.0
    raise UsageError(f"unknown function {req.kind!r}")


def _sweep(req: Request, rs) -> list[assemble.SweepRow]:
    lam = np.array(req.lam, dtype=complex)
    Ms = req.m_values
    if req.kind == "cm-toda":
        return assemble.limit_cm_toda(rs, lam, req.point, Ms, req.trunc, route=req.route).rows
    if req.kind == "main":
        return assemble.limit_main(rs, lam, req.point, Ms, req.trunc).rows
    if req.kind == "hamiltonian":
        return assemble.hamiltonian_limit_check(rs, lam, req.point, Ms, req.h).rows
    rows = []
    for M in Ms:
        lhs, rhs = factors.scaled_c_limit(rs, lam, M)
        rows.append(assemble.SweepRow(M, lhs, rhs, assemble.rel_error(lhs, rhs), 0.0, 0))
    return rows


def _row_dict(row: assemble.SweepRow) -> dict:
    return {
        "M": row.M,
        "lhs_re": _num(row.lhs.real), "lhs_im": _num(row.lhs.imag),
        "rhs_re": _num(row.rhs.real), "rhs_im": _num(row.rhs.imag),
        "rel_err": _num(row.rel_err), "tail_est": _num(row.tail_est),
        "in_chamber": row.in_chamber,
    }


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow(r)
    return buf.getvalue()


def _json(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def run(req: Request) -> tuple[int, str, str]:
    """Execute a parsed request; returns (exit code, stdout text, stderr text)."""
    rs = build_root_system(req.rs_label)
    command = f"{req.command} {req.kind}"
    doc = {"command": command, "params": req.params()}
    try:
        if req.command == "roots":
            info = _roots_info(rs)
            if req.fmt == "csv":
                rows = [(i, " ".join(map(str, r)), n, p)
                        for i, (r, n, p) in enumerate(zip(info["positive_roots"], info["root_norms"],
                                                          info["rho_vee_pairings"]))]
                return EXIT_OK, _csv(("index", "root", "norm", "rho_vee_pairing"), rows), ""
            doc["value"] = info
        elif req.command == "eval":
            value, tail = _evaluate(req, rs)
            if req.fmt == "csv":
                return EXIT_OK, _csv(("re", "im", "tail_est"),
                                     [(_fmt(value.real), _fmt(value.imag), _fmt(tail))]), ""
            doc["value"] = _complex_json(complex(value))
            doc["tail_est"] = _num(tail)
        else:
            rows = _sweep(req, rs)
            if req.fmt == "csv":
                data = [(_fmt(r.M), _fmt(r.lhs.real), _fmt(r.lhs.imag), _fmt(r.rhs.real),
                         _fmt(r.rhs.imag), _fmt(r.rel_err), _fmt(r.tail_est)) for r in rows]
                return EXIT_OK, _csv(SWEEP_COLUMNS, data), ""
            doc["rows"] = [_row_dict(r) for r in rows]
    except NumericalError as exc:
        doc["errors"] = [exc.as_record()]
        text = _json(doc)
        if req.fmt == "csv":
            return EXIT_NUMERICAL, "", text
        return EXIT_NUMERICAL, text, f"numerical failure: {exc.kind}: {exc.detail}\n"
    except UsageError as exc:
        return EXIT_USAGE, "", f"usage error: {exc}\n"
    doc["errors"] = []
    return EXIT_OK, _json(doc), ""


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        req = parse(argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    code, out, err = run(req)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
