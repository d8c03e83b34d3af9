"""Batch command-line front-end: parse system files, run pipeline stages,
emit certificates and verification reports as versioned JSON.

Exit codes: 0 success, 1 parse/validation/IO error, 2 spectral-class
violation, 3 domination failure, 4 tolerance unreachable.  Runs are fully
deterministic for a fixed seed; outputs are byte-identical for identical
config and input.  Every float in emitted JSON carries an error radius;
exact rationals are emitted as "p/q" strings.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import re
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .bounds import (
    BoundCertificate,
    CircleSlit,
    Constants,
    RegionBound,
    SlitPlan,
    SpectralClassViolation,
)
from .exact import GaussRat, Interval, Matrix, Poly
from .model import (
    CarpetingSpec,
    FuchsianSystem,
    SpherePoint,
    natural_carpet,
    r_flat,
    r_sharp,
    spectral_class_check,
    validate,
)
from .numerics import ToleranceUnreachable
from .paths import ArcSpec
from .reduction import (
    NormalizedChart,
    derive_scalar,
    normalize_chart,
    nu_default,
    slope,
    verify_slope_bound,
)
from .verify import verify_certificate

SCHEMA = "oscillate/1"

# Structural bounds are exact integers that can run to tens of thousands of
# digits; lift the interpreter's int <-> str conversion guard so they survive
# the JSON round trip.
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_SPECTRAL = 2
EXIT_DOMINATION = 3
EXIT_TOLERANCE = 4


# ---------------------------------------------------------------------------
# Scalar (de)serialization
# ---------------------------------------------------------------------------


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def parse_frac(v) -> Fraction:
    """Exact rational from "p/q" / decimal string / JSON number."""
    if isinstance(v, bool):
        raise ValueError(f"expected a rational, got {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)  # exact value of the binary float
    if isinstance(v, str):
        return Fraction(v.strip())
    raise ValueError(f"cannot parse rational from {v!r}")


def gauss_json(g: GaussRat) -> dict:
    return {"re": frac_str(g.re), "im": frac_str(g.im)}


def parse_gauss(v) -> GaussRat:
    if isinstance(v, dict):
        return GaussRat(parse_frac(v.get("re", 0)), parse_frac(v.get("im", 0)))
    if isinstance(v, (int, float, str)):
        return GaussRat(parse_frac(v))
    raise ValueError(f"cannot parse Gaussian rational from {v!r}")


_TOKEN_RE = re.compile(
    r"(?P<re>[+-]?\d+(?:/\d+|\.\d+)?)?(?P<im>[+-]?\d*(?:/\d+|\.\d+)?)i$|"
    r"(?P<plain>[+-]?\d+(?:/\d+|\.\d+)?)$"
)


def parse_gauss_token(s: str) -> GaussRat:
    """Parse one combination entry: "1", "-3/2", "0.5", "i", "1-2i", "3/2i"."""
    s = s.strip().replace(" ", "")
    m = _TOKEN_RE.fullmatch(s)
    if not m:
        raise ValueError(f"cannot parse combination entry {s!r}")
    if m.group("plain") is not None:
        return GaussRat(parse_frac(m.group("plain")))
    re_part = m.group("re")
    im_part = m.group("im")
    if re_part is not None and im_part in ("", None):
        # the regex can attribute "2i" to the re slot; it is the imaginary part
        re_part, im_part = None, re_part
    if im_part in ("", "+", None):
        im_part = "1"
    elif im_part == "-":
        im_part = "-1"
    return GaussRat(parse_frac(re_part or "0"), parse_frac(im_part))


def parse_combination(s: str, n: int) -> tuple[GaussRat, ...]:
    comb = tuple(parse_gauss_token(tok) for tok in s.split(","))
    if len(comb) != n:
        raise ValueError(f"combination has {len(comb)} entries, system rank is {n}")
    return comb


def fnum(x: float, radius: Optional[float] = None) -> dict:
    """A float with its error radius (unit roundoff of its magnitude unless a
    sharper radius is known)."""
    x = float(x)
    if radius is None:
        radius = max(abs(x), 1.0) * 2.0**-50
    return {"value": x, "radius": float(radius)}


def parse_fnum(v) -> float:
    if isinstance(v, dict):
        return float(v["value"])
    return float(v)


def cnum(z: complex, radius: Optional[float] = None) -> dict:
    z = complex(z)
    if radius is None:
        radius = max(abs(z), 1.0) * 2.0**-50
    return {"re": z.real, "im": z.imag, "radius": float(radius)}


def parse_cnum(v) -> complex:
    if isinstance(v, dict):
        return complex(float(v["re"]), float(v["im"]))
    raise ValueError(f"cannot parse complex number from {v!r}")


def interval_json(iv: Interval) -> dict:
    return {"lo": frac_str(iv.lo), "hi": frac_str(iv.hi)}


def parse_interval(v) -> Interval:
    return Interval(parse_frac(v["lo"]), parse_frac(v["hi"]))


# ---------------------------------------------------------------------------
# Structured (de)serialization
# ---------------------------------------------------------------------------


def system_json(system: FuchsianSystem) -> dict:
    poles = [
        "inf" if p.is_infinite else gauss_json(p.finite) for p in system.poles
    ]
    residues = [
        [[gauss_json(a[i, j]) for j in range(system.n)] for i in range(system.n)]
        for a in system.residues
    ]
    return {"schema": SCHEMA, "n": system.n, "poles": poles, "residues": residues}


def parse_system(doc: dict) -> FuchsianSystem:
    try:
        n = int(doc["n"])
        poles = tuple(
            SpherePoint.infinity()
            if p == "inf"
            else SpherePoint(parse_gauss(p))
            for p in doc["poles"]
        )
        residues = tuple(
            Matrix.from_rows([[parse_gauss(e) for e in row] for row in rows])
            for rows in doc["residues"]
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed system document: missing/invalid field {exc}") from exc
    return FuchsianSystem(n, poles, residues)


def poly_json(p: Poly) -> list:
    return [gauss_json(c) for c in p.coeffs]


def parse_poly(v) -> Poly:
    return Poly([parse_gauss(c) for c in v])


def chart_json(chart: NormalizedChart) -> dict:
    return {
        "moebius": [
            [gauss_json(chart.moebius[i, j]) for j in range(2)] for i in range(2)
        ],
        "scale": gauss_json(chart.scale),
        "normalized_poles": [gauss_json(p) for p in chart.normalized_poles],
        "R_bound": frac_str(chart.R_bound),
    }


def parse_chart(v) -> NormalizedChart:
    return NormalizedChart(
        moebius=Matrix.from_rows(
            [[parse_gauss(e) for e in row] for row in v["moebius"]]
        ),
        scale=parse_gauss(v["scale"]),
        normalized_poles=tuple(parse_gauss(p) for p in v["normalized_poles"]),
        R_bound=parse_frac(v["R_bound"]),
    )


def operator_json(op) -> dict:
    return {
        "order": op.order,
        "degree_bound": op.degree_bound,
        "coefficients": [poly_json(a) for a in op.coefficients],
    }


def parse_operator(v):
    from .reduction import ScalarOperator

    return ScalarOperator(
        order=int(v["order"]),
        coefficients=tuple(parse_poly(a) for a in v["coefficients"]),
        degree_bound=int(v["degree_bound"]),
    )


def plan_json(plan: SlitPlan) -> dict:
    return {
        "disk_radius": frac_str(plan.disk_radius),
        "direction": fnum(plan.direction),
        "clearance": frac_str(plan.clearance),
        "degree": plan.degree,
        "circles": [
            {"pole": cnum(c.pole), "rho": fnum(c.rho), "clearance": fnum(c.clearance)}
            for c in plan.circles
        ],
        "segments": [
            {
                "start": cnum(s.startpoint),
                "end": cnum(s.endpoint),
                "clearance": fnum(s.clearance),
            }
            for s in plan.segments
        ],
    }


def parse_plan(v) -> SlitPlan:
    circles = tuple(
        CircleSlit(
            pole=parse_cnum(c["pole"]),
            rho=parse_fnum(c["rho"]),
            clearance=parse_fnum(c["clearance"]),
        )
        for c in v["circles"]
    )
    segments = tuple(
        ArcSpec.segment(
            parse_cnum(s["start"]), parse_cnum(s["end"]), parse_fnum(s["clearance"])
        )
        for s in v["segments"]
    )
    return SlitPlan(
        disk_radius=parse_frac(v["disk_radius"]),
        circles=circles,
        segments=segments,
        direction=parse_fnum(v["direction"]),
        clearance=parse_frac(v["clearance"]),
        degree=int(v["degree"]),
    )


def certificate_json(cert: BoundCertificate) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "bound-certificate",
        "system": system_json(cert.system),
        "combination": [gauss_json(c) for c in cert.combination],
        "chart": chart_json(cert.chart),
        "operator": operator_json(cert.operator),
        "plan": plan_json(cert.plan),
        "arc_bounds": [
            {"bound_radians": frac_str(ab.bound), "length": interval_json(ab.arc.length())}
            for ab in cert.arc_bounds
        ],
        "region_bounds": [
            {
                "name": rb.name,
                "kind": rb.kind,
                "bound": rb.bound,
                "variation_total": frac_str(rb.variation_total),
            }
            for rb in cert.region_bounds
        ],
        "total": cert.total,
        "log2_total": frac_str(cert.log2_total),
        "closed_form": {
            "R": interval_json(cert.closed_form_R.value),
            "nu": frac_str(cert.closed_form_nu),
            "holds": cert.closed_form_holds(),
        },
        "constants": {
            k: (frac_str(v) if isinstance(v, Fraction) else v)
            for k, v in cert.constants.items()
        },
    }


def parse_certificate(doc: dict) -> BoundCertificate:
    from .model import CarpetValue

    if doc.get("kind") != "bound-certificate":
        raise ValueError("input is not a bound certificate")
    region_bounds = tuple(
        RegionBound(
            name=rb["name"],
            kind=rb["kind"],
            bound=int(rb["bound"]),
            variation_total=parse_frac(rb["variation_total"]),
            details={},
        )
        for rb in doc["region_bounds"]
    )
    return BoundCertificate(
        chart=parse_chart(doc["chart"]),
        operator=parse_operator(doc["operator"]),
        plan=parse_plan(doc["plan"]),
        arc_bounds=(),
        region_bounds=region_bounds,
        total=int(doc["total"]),
        log2_total=parse_frac(doc["log2_total"]),
        closed_form_R=CarpetValue(parse_interval(doc["closed_form"]["R"])),
        closed_form_nu=parse_frac(doc["closed_form"]["nu"]),
        constants=dict(doc["constants"]),
        system=parse_system(doc["system"]),
        combination=tuple(parse_gauss(c) for c in doc["combination"]),
        trace=None,
    )


def count_report_json(report, dominated_field: bool = True) -> dict:
    out = {
        "schema": SCHEMA,
        "kind": "zero-count-report",
        "tolerance": fnum(report.tolerance, radius=0.0),
        "regions": [
            {
                "name": r.name,
                "structural_bound": r.structural_bound,
                "numeric_count": r.numeric_count,
                "winding_margin": fnum(r.winding_margin),
                "branch_defect": fnum(r.branch_defect),
                "perturbation_step": r.perturbation_step,
                "dominated": r.dominated,
            }
            for r in report.regions
        ],
    }
    if dominated_field:
        out["dominated"] = report.dominated
    return out


# ---------------------------------------------------------------------------
# IO helpers
# ---------------------------------------------------------------------------


def _read_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def _emit(doc, output: Optional[str]) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_constants(path: Optional[str]) -> Constants:
    if not path:
        return Constants()
    doc = _read_json(path)
    kwargs = {}
    if "c_vp" in doc:
        kwargs["c_vp"] = parse_frac(doc["c_vp"])
    for key in ("nu_c", "axis_nu", "chart_grid", "slit_grid_per_degree"):
        if key in doc:
            kwargs[key] = int(doc[key])
    return Constants(**kwargs)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    system = parse_system(_read_json(args.input))
    report = validate(system)
    spectrum = spectral_class_check(system)
    _emit(
        {
            "schema": SCHEMA,
            "kind": "validation-report",
            "valid": report.valid,
            "in_proper_class": report.in_proper_class,
            "zero_residue_indices": list(report.zero_residue_indices),
            "messages": list(report.messages),
            "spectral_class": spectrum.all_real,
            "per_residue_real_spectrum": list(spectrum.per_residue_real),
        },
        args.output,
    )
    return EXIT_OK


def cmd_normalize(args) -> int:
    system = parse_system(_read_json(args.input))
    chart, normalized = normalize_chart(system, grid_seed=args.seed)
    _emit(
        {
            "schema": SCHEMA,
            "kind": "normalized-system",
            "chart": chart_json(chart),
            "system": system_json(normalized),
        },
        args.output,
    )
    return EXIT_OK


def cmd_reduce(args) -> int:
    system = parse_system(_read_json(args.input))
    if not args.combination:
        raise ValueError("reduce requires --combination")
    comb = parse_combination(args.combination, system.n)
    op, trace = derive_scalar(system, comb)
    sl = slope(op)
    nu = nu_default(system.n, system.m)
    _emit(
        {
            "schema": SCHEMA,
            "kind": "scalar-operator",
            "operator": operator_json(op),
            "slope": interval_json(sl),
            "slope_bound_ok": verify_slope_bound(op, r_flat(system), nu),
            "degenerate": trace.degenerate,
            "bit_complexity": trace.bit_complexity,
        },
        args.output,
    )
    return EXIT_OK


def cmd_carpet(args) -> int:
    system = parse_system(_read_json(args.input))
    rf = r_flat(system)
    chart, normalized = normalize_chart(system, grid_seed=args.seed)
    rs = r_sharp(normalized.numerator_matrix(), normalized.denominator())
    agg = natural_carpet([rf, rs], CarpetingSpec())
    _emit(
        {
            "schema": SCHEMA,
            "kind": "carpet-report",
            "r_flat": interval_json(rf.value),
            "r_sharp_normalized_chart": interval_json(rs.value),
            "shifted_product": interval_json(agg.value),
        },
        args.output,
    )
    return EXIT_OK


def _spectral_report(system: FuchsianSystem, exc: SpectralClassViolation, output):
    import mpmath

    idx = exc.residue_index
    a = system.residues[idx].to_complex_list()
    eigvals, _ = mpmath.mp.eig(mpmath.matrix(a))
    _emit(
        {
            "schema": SCHEMA,
            "kind": "spectral-violation",
            "residue_index": idx,
            "eigenvalues": [
                cnum(complex(float(ev.real), float(ev.imag)), radius=1e-12)
                for ev in eigvals
            ],
            "message": str(exc),
        },
        output,
    )


def cmd_bound(args) -> int:
    from .bounds import assemble_bound

    system = parse_system(_read_json(args.input))
    constants = _load_constants(args.constants)
    if not args.combination:
        raise ValueError("bound requires --combination")
    comb = parse_combination(args.combination, system.n)
    try:
        cert = assemble_bound(system, comb, constants=constants, chart_seed=args.seed)
    except SpectralClassViolation as exc:
        _spectral_report(system, exc, args.output)
        return EXIT_SPECTRAL
    _emit(certificate_json(cert), args.output)
    return EXIT_OK


def cmd_count(args) -> int:
    cert = parse_certificate(_read_json(args.input))
    report = verify_certificate(cert, tol=args.tol)
    _emit(count_report_json(report, dominated_field=False), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    cert = parse_certificate(_read_json(args.input))
    report = verify_certificate(cert, tol=args.tol)
    _emit(count_report_json(report), args.output)
    return EXIT_OK if report.dominated else EXIT_DOMINATION


def _render_svg(doc: dict, path: str) -> None:
    plan = parse_plan(doc["plan"])
    op = parse_operator(doc["operator"])
    from .roots import root_enclosures

    roots, _ = root_enclosures(op.a0)
    r = float(plan.disk_radius) * 1.15
    size = 640
    scale = size / (2 * r)

    def sx(z: complex) -> float:
        return (z.real + r) * scale

    def sy(z: complex) -> float:
        return (r - z.imag) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<circle cx="{size/2}" cy="{size/2}" r="{float(plan.disk_radius)*scale:.2f}" '
        'fill="none" stroke="black" stroke-width="1.5"/>',
    ]
    for c in plan.circles:
        parts.append(
            f'<circle cx="{sx(c.pole):.2f}" cy="{sy(c.pole):.2f}" '
            f'r="{c.rho*scale:.2f}" fill="none" stroke="blue" stroke-width="1"/>'
        )
        parts.append(
            f'<circle cx="{sx(c.pole):.2f}" cy="{sy(c.pole):.2f}" r="3" fill="blue"/>'
        )
    for s in plan.segments:
        a, b = s.startpoint, s.endpoint
        parts.append(
            f'<line x1="{sx(a):.2f}" y1="{sy(a):.2f}" x2="{sx(b):.2f}" '
            f'y2="{sy(b):.2f}" stroke="green" stroke-width="1" stroke-dasharray="4 2"/>'
        )
    for enc in roots:
        parts.append(
            f'<circle cx="{sx(enc.center):.2f}" cy="{sy(enc.center):.2f}" r="2.5" '
            'fill="red"/>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def cmd_report(args) -> int:
    doc = _read_json(args.input)
    kind = doc.get("kind")
    lines = []
    if kind == "bound-certificate":
        lines.append("Bound certificate")
        lines.append(f"  system rank n = {doc['system']['n']}, poles m = {len(doc['system']['poles'])}")
        lines.append(f"  operator order {doc['operator']['order']}, degree bound {doc['operator']['degree_bound']}")
        lines.append(f"  disk radius {doc['plan']['disk_radius']}, {len(doc['plan']['circles'])} pole circles")
        for rb in doc["region_bounds"]:
            lines.append(f"  region {rb['name']} ({rb['kind']}): bound {rb['bound']}")
        lines.append(f"  total zero-count bound: {doc['total']}")
        cf = doc["closed_form"]
        lines.append(
            f"  closed form: R in [{cf['R']['lo']}, {cf['R']['hi']}], nu = {cf['nu']}, holds = {cf['holds']}"
        )
        if args.svg:
            _render_svg(doc, args.svg)
            lines.append(f"  slit-plan plot written to {args.svg}")
    elif kind == "zero-count-report":
        lines.append("Zero count report")
        for rg in doc["regions"]:
            lines.append(
                f"  region {rg['name']}: counted {rg['numeric_count']} "
                f"<= bound {rg['structural_bound']} "
                f"({'ok' if rg['dominated'] else 'VIOLATED'})"
            )
        if "dominated" in doc:
            lines.append(f"  dominated: {doc['dominated']}")
    else:
        raise ValueError(f"cannot render report for document kind {kind!r}")
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "validate": cmd_validate,
    "normalize": cmd_normalize,
    "reduce": cmd_reduce,
    "carpet": cmd_carpet,
    "bound": cmd_bound,
    "count": cmd_count,
    "verify": cmd_verify,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscillate",
        description="Zero-count bounds and certification for Fuchsian systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", required=True, help="input JSON file")
        p.add_argument("--output", default=None, help="output file (default stdout)")
        p.add_argument("--combination", default=None, help="comma-separated covector, e.g. 1,-1")
        p.add_argument("--tol", type=float, default=1e-8, help="numeric tolerance")
        p.add_argument("--constants", default=None, help="JSON file overriding configuration constants")
        p.add_argument("--seed", type=int, default=0, help="deterministic seed for grid searches")
        p.add_argument("--jobs", type=int, default=1, help="worker cap (single process)")
        if name == "report":
            p.add_argument("--svg", default=None, help="also emit a slit-plan plot as SVG")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.tol <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_PARSE
    try:
        return _COMMANDS[args.command](args)
    except ToleranceUnreachable as exc:
        print(f"error: tolerance unreachable: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
