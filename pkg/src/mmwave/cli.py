"""``mmwave`` command-line interface.

Exit codes: 0 success or all conditions pass, 1 a condition fails, 2 usage
or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import acoustic12, criteria, dispersion
from .blocks import Model
from .params import CauchyParams, CosseratParams, MaterialParams, ParamsError, derive

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

MODEL_TYPES = {
    "relaxed": (Model.RELAXED, MaterialParams),
    "cosserat": (Model.COSSERAT, CosseratParams),
    "cauchy": (Model.CAUCHY, CauchyParams),
}
SWEEP_KEYS = {"k_max", "samples"}


class InputError(Exception):
    """Malformed parameter file or argument; maps to exit code 2."""


# ----------------------------------------------------------------- ParamFile


class ParamFile:
    """Parsed parameter document.

    Keys: ``model`` (relaxed, cosserat or cauchy), the model constants either
    at top level or under ``parameters``, optional ``sweep`` with ``k_max``
    and ``samples``, optional integer ``seed``.  Unknown keys are rejected.
    """

    def __init__(self, model: Model, params, sweep: dict, seed):
        self.model = model
        self.params = params
        self.sweep = sweep
        self.seed = seed

    @classmethod
    def parse(cls, doc) -> "ParamFile":
        if not isinstance(doc, dict):
            raise InputError("parameter file must be a JSON object")
        doc = dict(doc)
        name = doc.pop("model", None)
        if not isinstance(name, str) or name.lower() not in MODEL_TYPES:
            raise InputError(f"'model' must be one of {sorted(MODEL_TYPES)}, got {name!r}")
        model, ptype = MODEL_TYPES[name.lower()]
        fields = ptype.field_names()
        if "parameters" in doc:
            values = doc.pop("parameters")
            if not isinstance(values, dict):
                raise InputError("'parameters' must be an object")
        else:
            values = {f: doc.pop(f) for f in fields if f in doc}
        sweep = doc.pop("sweep", {})
        seed = doc.pop("seed", None)
        if doc:
            raise InputError(f"unknown keys: {', '.join(sorted(doc))}")
        unknown = set(values) - set(fields)
        if unknown:
            raise InputError(f"unknown parameters for {model.value}: {', '.join(sorted(unknown))}")
        missing = [f for f in fields if f not in values]
        if missing:
            raise InputError(f"missing parameters for {model.value}: {', '.join(missing)}")
        for f in fields:
            x = values[f]
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                raise InputError(f"parameter {f} must be a finite number, got {x!r}")
        if not isinstance(sweep, dict) or set(sweep) - SWEEP_KEYS:
            raise InputError(f"'sweep' must be an object with keys among {sorted(SWEEP_KEYS)}")
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
            raise InputError("'seed' must be an integer")
        return cls(model, ptype(**{f: float(values[f]) for f in fields}), sweep, seed)

    @classmethod
    def load(cls, path: str) -> "ParamFile":
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
        return cls.parse(doc)


# ------------------------------------------------------------------ file I/O


def write_atomic(path: str, text: str) -> None:
    """Write to a sibling temporary file, then rename over ``path``."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".mmwave-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _num(x: float) -> str:
    return format(float(x), ".17g")


def branches_csv(branches) -> str:
    """BranchCSV text: ``k,branch_label,omega,status`` sorted by (label, k)."""
    rows = []
    for b in branches:
        for k, w, s in zip(b.k, b.omega, b.status):
            rows.append((b.name, float(k), w, str(s)))
    rows.sort(key=lambda r: (r[0], r[1]))
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["k", "branch_label", "omega", "status"])
    for name, k, w, s in rows:
        out.writerow([_num(k), name, "nan" if s == dispersion.IMAGINARY else _num(w), s])
    return buf.getvalue()


def read_csv(text: str) -> dict:
    """Inverse of :func:`branches_csv`: label -> list of ``(k, omega | "imaginary")``."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != ["k", "branch_label", "omega", "status"]:
        raise ValueError(f"unexpected header {header}")
    out: dict = {}
    for k, label, w, status in reader:
        if status not in (dispersion.REAL, dispersion.IMAGINARY):
            raise ValueError(f"bad status {status!r}")
        out.setdefault(label, []).append(
            (float(k), dispersion.IMAGINARY if status == dispersion.IMAGINARY else float(w))
        )
    return out


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22")


def branches_svg(branches, width: int = 800, height: int = 600) -> str:
    """Static line plot of omega against k, one polyline per real run of samples."""
    left, right, top, bottom = 70, 150, 30, 50
    kmax = max(float(b.k[-1]) for b in branches) or 1.0
    finite = [w for b in branches for w in b.omega if np.isfinite(w)]
    wmax = max(finite) if finite else 1.0
    wmax = wmax or 1.0
    pw, ph = width - left - right, height - top - bottom

    def xy(k, w):
        return left + pw * k / kmax, top + ph * (1.0 - w / wmax)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
        f'<text x="{left + pw / 2}" y="{height - 12}" text-anchor="middle" font-size="14">k</text>',
        f'<text x="18" y="{top + ph / 2}" text-anchor="middle" font-size="14">&#969;</text>',
        f'<text x="{left}" y="{top + ph + 18}" text-anchor="middle" font-size="11">0</text>',
        f'<text x="{left + pw}" y="{top + ph + 18}" text-anchor="middle" font-size="11">{kmax:.4g}</text>',
        f'<text x="{left - 6}" y="{top + 4}" text-anchor="end" font-size="11">{wmax:.4g}</text>',
    ]
    for i, b in enumerate(branches):
        color = _COLORS[i % len(_COLORS)]
        run: list = []
        runs = []
        for k, w in zip(b.k, b.omega):
            if np.isfinite(w):
                run.append(xy(k, w))
            elif run:
                runs.append(run)
                run = []
        if run:
            runs.append(run)
        for r in runs:
            pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in r)
            parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 14 * (i + 1)
        parts.append(f'<line x1="{width - right + 10}" y1="{ly - 4}" x2="{width - right + 30}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{width - right + 36}" y="{ly}" font-size="11">{b.name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ------------------------------------------------------------------ commands


def _fmt(x) -> str:
    return "undefined" if x is None else f"{x:.12g}"


def cmd_derive(args, out) -> int:
    pf = ParamFile.load(args.params)
    p = pf.params
    if isinstance(p, MaterialParams):
        for key, val in derive(p).as_dict().items():
            print(f"{key} = {_fmt(val)}", file=out)
        return EXIT_OK
    c_l, c_t = dispersion.closed_form_tangents(p)
    print(f"mu_macro = {_fmt(p.mu_macro)}", file=out)
    print(f"lambda_macro = {_fmt(p.lambda_macro)}", file=out)
    print(f"kappa_macro = {_fmt(p.lambda_macro + 2 * p.mu_macro / 3)}", file=out)
    print(f"c_l = {_fmt(c_l)}", file=out)
    print(f"c_t = {_fmt(c_t)}", file=out)
    if isinstance(p, CosseratParams):
        wr2 = 2 * p.mu_c / p.eta
        print(f"omega_r = {_fmt(math.sqrt(wr2) if wr2 >= 0 else None)}", file=out)
    return EXIT_OK


def _resolve_set(name: str) -> criteria.ConditionSet:
    if name in criteria.CLI_NAMES:
        return criteria.CLI_NAMES[name]
    try:
        return criteria.ConditionSet(name)
    except ValueError:
        raise InputError(
            f"unknown condition set {name!r}; choose from {', '.join(criteria.CLI_NAMES)}"
        ) from None


def cmd_check(args, out) -> int:
    pf = ParamFile.load(args.params)
    if args.all:
        sets = criteria.applicable_sets(pf.params)
    else:
        sets = (_resolve_set(args.set),)
        if sets[0] not in criteria.applicable_sets(pf.params):
            raise InputError(f"{sets[0].value} does not apply to a {pf.model.value} parameter file")
    ok = True
    for s in sets:
        report = criteria.check(pf.params, s, tol=args.tol)
        print(f"{s.value}: {'PASS' if report.passed else 'FAIL'}", file=out)
        for line in report.lines():
            print(line, file=out)
        ok &= report.passed
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sweep(args, out) -> int:
    pf = ParamFile.load(args.params)
    k_max = args.kmax if args.kmax is not None else pf.sweep.get("k_max", 10.0)
    n = args.samples if args.samples is not None else pf.sweep.get("samples", 200)
    model = Model(MODEL_TYPES[args.model][0]) if args.model else pf.model
    try:
        grid = dispersion.k_grid(k_max, n)
        branches = dispersion.sweep(pf.params, model, k=grid)
    except dispersion.InvalidGrid as exc:
        raise InputError(str(exc)) from exc
    except TypeError as exc:
        raise InputError(str(exc)) from exc
    text = branches_csv(branches)
    try:
        write_atomic(args.out, text)
        if args.svg:
            write_atomic(args.svg, branches_svg(branches))
    except OSError as exc:
        raise InputError(f"cannot write output: {exc}") from exc
    names = sorted({b.name for b in branches})
    imag = sum(int(np.count_nonzero(b.status == dispersion.IMAGINARY)) for b in branches)
    print(f"wrote {len(names)} branches x {len(grid)} samples to {args.out}", file=out)
    if imag:
        print(f"warning: {imag} imaginary samples", file=out)
    return EXIT_OK


def _parse_direction(text: str) -> np.ndarray:
    try:
        v = np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise InputError(f"direction must be three comma-separated numbers, got {text!r}") from None
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise InputError(f"direction must be three finite numbers, got {text!r}")
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise InputError("direction must be non-zero")
    return v / n


BLOCK_EQUIVALENCE_TOL = 1e-8


def cmd_acoustic12(args, out) -> int:
    pf = ParamFile.load(args.params)
    if pf.model is not Model.RELAXED:
        raise InputError("acoustic12 needs a relaxed parameter file")
    xi = _parse_direction(args.direction)
    if not math.isfinite(args.k):
        raise InputError("k must be finite")
    print(f"note: direction normalized to ({_num(xi[0])}, {_num(xi[1])}, {_num(xi[2])})", file=out)
    a = acoustic12.assemble_12(pf.params, xi, args.k)
    w = a.eigenvalues()
    print(f"eigenvalues (omega^2) at k = {_num(args.k)}:", file=out)
    for x in w:
        print(f"  {x:.15g}", file=out)
    if np.array_equal(xi, [1.0, 0.0, 0.0]):
        dev = acoustic12.block_equivalence(pf.params, args.k)
        verdict = "PASS" if dev <= BLOCK_EQUIVALENCE_TOL else "FAIL"
        print(f"block-equivalence: {verdict} (max dev <= 1e-8; observed {dev:.3e})", file=out)
        return EXIT_OK if verdict == "PASS" else EXIT_FAIL
    return EXIT_OK


def verify_summary(trials: int, seed: int, threads: int | None = None) -> tuple[str, bool]:
    """Text of the verification table and its overall verdict."""
    m = criteria.implication_matrix(trials, seed, threads)
    ag = dispersion.spectral_agreement(trials, seed, threads)
    lines = [f"verify: trials={trials} seed={seed}", "", "proven implications (counterexamples must be 0):"]
    ok = True
    for a, b in criteria.PROVEN_IMPLICATIONS:
        n = m.count(a, b)
        ok &= n == 0
        lines.append(f"  {a.value} => {b.value}: {n}")
    lines.append("")
    lines.append("refuted implications (counterexamples expected):")
    for a, b in criteria.REFUTED_IMPLICATIONS:
        lines.append(f"  {a.value} => {b.value}: {m.count(a, b)}")
    lines.append("")
    lines.append("pass counts:")
    for s in m.sets:
        lines.append(f"  {s.value}: {m.pass_counts[s]}")
    lines.append("")
    lines.append(
        f"criteria/spectra agreement: {ag.agree}/{ag.trials} ({100.0 * ag.rate:.4f}%); "
        f"criterion-only passes {ag.false_pass}, spectrum-only passes {ag.false_fail}"
    )
    ok &= ag.agree == ag.trials
    lines.append(f"result: {'PASS' if ok else 'FAIL'}")
    return "\n".join(lines) + "\n", ok


def cmd_verify(args, out) -> int:
    if args.trials < 1:
        raise InputError(f"--trials must be >= 1, got {args.trials}")
    try:
        threads = criteria.thread_count()
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    text, ok = verify_summary(args.trials, args.seed, threads)
    out.write(text)
    return EXIT_OK if ok else EXIT_FAIL


# -------------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mmwave", description="Plane-wave dispersion and real-wave criteria for generalized continua.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("derive", help="print derived moduli")
    p.add_argument("params")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("check", help="evaluate condition sets")
    p.add_argument("params")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--set", help=f"one of {', '.join(criteria.CLI_NAMES)}")
    g.add_argument("--all", action="store_true", help="every set applicable to the model")
    p.add_argument("--tol", type=float, default=0.0, help="absolute slack tolerance")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="sample dispersion branches to CSV")
    p.add_argument("params")
    p.add_argument("--kmax", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--svg")
    p.add_argument("--model", choices=sorted(MODEL_TYPES), help="reduce a relaxed file to another model")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("acoustic12", help="spectrum of the full 12x12 acoustic tensor")
    p.add_argument("params")
    p.add_argument("--direction", default="1,0,0")
    p.add_argument("--k", type=float, default=1.0)
    p.set_defaults(func=cmd_acoustic12)

    p = sub.add_parser("verify", help="randomized implication and spectral agreement scan")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParamsError, acoustic12.NonUnitDirection) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
