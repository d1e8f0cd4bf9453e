"""Command-line front end.

Subcommands: cgp (surgery presentations from JSON), constants, moddim,
statespace (CSV), check (runs the axiom and property suites).  Flags can
also be set through CGP_-prefixed environment variables; outputs are
deterministic, with floats printed at 17 significant digits in a fixed
field order.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import diagrams as dg
from . import state_spaces as ss
from . import surgery as sg
from . import weightcat as wc
from ._linalg import NumericInstability
from .qscalars import ScalarContext
from .rt_eval import NotAdmissible as RTNotAdmissible

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_NOT_COMPUTABLE = 3
EXIT_NOT_ADMISSIBLE = 4
EXIT_NUMERIC = 5


class ParseError(ValueError):
    pass


def _fmt_float(x: float) -> str:
    x = float(x)
    if x == 0.0:
        x = 0.0  # normalize negative zero
    return format(x, ".17g")


def render_json(obj, indent=0) -> str:
    """Deterministic JSON with fixed float formatting and insertion order."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for k, v in obj.items():
            items.append(f'{pad}  "{k}": {render_json(v, indent + 1)}')
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        flat = all(isinstance(x, (int, float, str, bool)) or x is None for x in obj)
        if flat:
            return "[" + ", ".join(render_json(x) for x in obj) + "]"
        items = [f"{pad}  {render_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, complex):
        return render_json([obj.real, obj.imag])
    return json.dumps(obj)


def _env_default(name: str, fallback):
    return os.environ.get(f"CGP_{name}", fallback)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cgpkit",
                                 description="CGP quantum invariants of decorated 3-manifolds")
    ap.add_argument("--version", action="version", version=f"cgpkit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        env_level = _env_default("LEVEL", None)
        p.add_argument("--level", type=int,
                       default=int(env_level) if env_level else None,
                       help="even level r (overrides the input file)")
        p.add_argument("--precision", type=int,
                       default=int(_env_default("PRECISION", 53)))
        p.add_argument("--tol", type=float, default=float(_env_default("TOL", 1e-9)))
        p.add_argument("--jobs", type=int, default=int(_env_default("JOBS", 1)))

    p = sub.add_parser("cgp", help="evaluate a surgery presentation from JSON")
    common(p)
    p.add_argument("input", help="input JSON file, or - for stdin")
    p.add_argument("--auto-stabilize", action="store_true",
                   default=bool(int(_env_default("AUTO_STABILIZE", "0"))))
    p.add_argument("--cache-dir", default=_env_default("CACHE_DIR", None))

    p = sub.add_parser("constants", help="print the invariant constants at a level")
    common(p)
    p.add_argument("r", type=int)

    p = sub.add_parser("moddim", help="modified dimensions of typical weights")
    common(p)
    p.add_argument("r", type=int)
    p.add_argument("alpha", nargs="+",
                   help="weights as floats or re+imj complex literals")

    p = sub.add_parser("statespace", help="state-space dimension table (CSV)")
    common(p)
    p.add_argument("r", type=int)
    p.add_argument("genus", type=int)
    p.add_argument("degrees", nargs="+",
                   help="meridian classes: m0 for genus 1; m0 m1' ... for higher genus")

    p = sub.add_parser("check", help="run the axiom/property suite at a level")
    common(p)
    p.add_argument("r", type=int)
    return ap


def _parse_complex(s: str) -> complex:
    try:
        return complex(s.replace(" ", ""))
    except ValueError as e:
        raise ParseError(f"bad complex literal {s!r}") from e


def _degree_from_json(v) -> wc.Degree:
    if isinstance(v, (int, float)):
        return wc.Degree(complex(v))
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return wc.Degree(complex(v[0], v[1]))
    if isinstance(v, str):
        return wc.Degree(_parse_complex(v))
    raise ParseError(f"bad degree {v!r}")


def load_presentation(obj) -> sg.SurgeryPresentation:
    try:
        d = dg.diagram_from_json(obj["diagram"])
        surgery = frozenset(int(c) for c in obj["surgery_components"])
        degrees = {int(k): _degree_from_json(v)
                   for k, v in obj.get("meridian_degrees", {}).items()}
        for cid, col in obj.get("graph_colors", {}).items():
            d = d.recolor_component(int(cid), dg.color_from_json(col))
        n = int(obj.get("signature_defect", 0))
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"bad presentation: {e}") from e
    return sg.SurgeryPresentation(d, surgery, degrees, n)


def _canonical_digest(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def cmd_cgp(args) -> int:
    try:
        raw = sys.stdin.read() if args.input == "-" else Path(args.input).read_text()
        payload = json.loads(raw)
    except (OSError, json.JSONDecodeError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    cache_key = None
    if args.cache_dir:
        cache_key = _canonical_digest(
            {"input": payload, "version": __version__,
             "auto": bool(args.auto_stabilize), "tol": args.tol,
             "precision": args.precision})
        cache_file = Path(args.cache_dir) / f"{cache_key}.json"
        if cache_file.exists():
            sys.stdout.write(cache_file.read_text())
            return EXIT_OK
    try:
        level = args.level or int(payload["level"])
        precision = int(payload.get("precision", args.precision))
        ctx = ScalarContext(level, precision=precision, tol=args.tol)
        if "presentations" in payload:
            pieces = [load_presentation(o) for o in payload["presentations"]]
        else:
            pieces = [load_presentation(payload["presentation"])]
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (KeyError, TypeError, ValueError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    warnings = []
    try:
        total = ctx.scalar(1)
        ells = 0
        sigmas = []
        for p in pieces:
            sg.validate_presentation(ctx, p)
            offending = sg.check_computable(ctx, p)
            if offending and not args.auto_stabilize:
                raise sg.NotComputable(
                    f"critical meridian degrees on components {offending}; "
                    f"rerun with --auto-stabilize")
            link = sg.linking_data(ctx, p)
            ells += len(p.surgery_components)
            sigmas.append(link.signature)
            total = total * sg.cgp(ctx, p, auto=args.auto_stabilize, jobs=args.jobs)
            if offending:
                warnings.append(
                    f"auto-stabilized components {offending}")
        consts = wc.constants(ctx)
        out = {
            "cgp": [complex(total).real, complex(total).imag],
            "constants": _constants_dict(consts),
            "ell": ells,
            "sigma": sigmas[0] if len(sigmas) == 1 else sigmas,
            "warnings": warnings,
        }
    except sg.NotComputable as e:
        print(f"not computable: {e}", file=sys.stderr)
        return EXIT_NOT_COMPUTABLE
    except (sg.NotAdmissible, RTNotAdmissible) as e:
        print(f"not admissible: {e}", file=sys.stderr)
        return EXIT_NOT_ADMISSIBLE
    except (NumericInstability, wc.NotScalar) as e:
        print(f"numeric instability: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, sg.CannotStabilize) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    text = render_json(out) + "\n"
    if args.cache_dir:
        Path(args.cache_dir).mkdir(parents=True, exist_ok=True)
        (Path(args.cache_dir) / f"{cache_key}.json").write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def _constants_dict(c: wc.InvariantConstants) -> dict:
    def pair(z):
        z = complex(z)
        return [z.real, z.imag]
    return {
        "delta_minus": pair(c.delta_minus),
        "delta_plus": pair(c.delta_plus),
        "D": pair(c.D),
        "eta": pair(c.eta),
        "delta": pair(c.delta),
        "zeta": pair(c.zeta),
        "z_mod_zplus": c.z_mod_zplus,
    }


def cmd_constants(args) -> int:
    ctx = ScalarContext(args.r, precision=args.precision, tol=args.tol)
    c = wc.constants(ctx)
    resid = abs(c.delta_minus * c.delta_plus - c.z_mod_zplus * c.zeta)
    out = _constants_dict(c)
    out["identity_residual"] = float(resid)
    sys.stdout.write(render_json(out) + "\n")
    return EXIT_OK if resid <= 1e-8 * max(1.0, abs(c.zeta)) else EXIT_NUMERIC


def cmd_moddim(args) -> int:
    ctx = ScalarContext(args.r, precision=args.precision, tol=args.tol)
    out = {}
    for s in args.alpha:
        a = _parse_complex(s)
        d = complex(wc.modified_dimension(ctx, a))
        out[s] = [d.real, d.imag]
    sys.stdout.write(render_json(out) + "\n")
    return EXIT_OK


def cmd_statespace(args) -> int:
    ctx = ScalarContext(args.r, precision=args.precision, tol=args.tol)
    degrees = [_parse_complex(s) for s in args.degrees]
    lines = ["genus,degrees,dimension"]
    if args.genus == 1:
        dim = ss.genus1_dim(ctx, wc.Degree(degrees[0]))
    else:
        if len(degrees) != args.genus:
            print("need m0 and one primed class per piece", file=sys.stderr)
            return EXIT_PARSE
        data = ss.TrivalentSurfaceData(
            args.genus, wc.Degree(degrees[0]),
            tuple(wc.Degree(g) for g in degrees[1:]))
        dim = ss.genus_n_dim(ctx, data)
    deg_str = ";".join(format(g.real, ".17g") +
                       (f"+{format(g.imag, '.17g')}j" if g.imag else "")
                       for g in degrees)
    lines.append(f"{args.genus},{deg_str},{dim}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_check(args) -> int:
    from . import checks
    report = checks.run_all(ScalarContext(args.r, precision=args.precision,
                                          tol=args.tol))
    ok = True
    for name, passed, detail in report:
        status = "pass" if passed else "FAIL"
        ok = ok and passed
        sys.stdout.write(f"{status}  {name}  {detail}\n")
    sys.stdout.write(("all checks passed" if ok else "CHECKS FAILED") + "\n")
    return EXIT_OK if ok else EXIT_ERROR


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "cgp": cmd_cgp,
        "constants": cmd_constants,
        "moddim": cmd_moddim,
        "statespace": cmd_statespace,
        "check": cmd_check,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
