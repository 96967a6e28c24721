"""Command-line front end.  Every subcommand prints one JSON document.

Exit codes: 0 success, 2 undetermined (budget exhausted), 3 invalid model,
1 any other error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .boundary import CollapseError, boundary_tangent, collapse, pushforward
from .deform import add_cocycle, shear_cylinders, stretch_cylinders, stretch_cocycle, twist_cocycle
from .exactalg import FieldElem, Vec2, parse_elem
from .flow import decompose, shortest_saddle_connections
from .homology import Homology
from .surface import SurfaceError, loads
from .tangent import (
    InvalidInput,
    InvalidModel,
    STConfig,
    field_name,
    field_of_definition,
    gl2_orbit_model,
    is_recognizable,
    load_model,
    rank,
    recognizable_span,
    stratum_tangent,
)

DEFAULT_BUDGET = 10_000


class Undetermined(RuntimeError):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _load_surface(path: str):
    return loads(Path(path).read_text())


def _direction(text: str, d: int) -> Vec2:
    parts = text.split(",")
    if len(parts) != 2:
        raise InvalidInput(f"direction must be 'a,b', got {text!r}")
    v = Vec2(parse_elem(parts[0].strip(), d), parse_elem(parts[1].strip(), d))
    if v.is_zero():
        raise InvalidInput("direction must be nonzero")
    return v


def _elems(text: str, d: int) -> list[FieldElem]:
    return [parse_elem(x.strip(), d) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _decompose(s, args):
    dec = decompose(s, _direction(args.dir, s.d), args.budget)
    if not dec.periodic:
        raise Undetermined(dec.reason)
    return dec


def _model(h: Homology, spec: str):
    if spec == "stratum":
        return stratum_tangent(h)
    if spec == "gl2":
        return gl2_orbit_model(h)
    return load_model(h, json.loads(Path(spec).read_text()))


def _cylinders(args, dec) -> list[int]:
    if getattr(args, "cylinders", None):
        idx = _ints(args.cylinders)
        for i in idx:
            if not 0 <= i < len(dec.cylinders):
                raise InvalidInput(f"no cylinder {i}")
        return idx
    return [c.index for c in dec.cylinders]


# -- subcommands ---------------------------------------------------------------


def cmd_validate(args):
    s = _load_surface(args.surface)
    return {"valid": True, "components": list(s.labels), "triangles": s.num_triangles, "area": str(s.area())}


def cmd_signature(args):
    s = _load_surface(args.surface)
    sigs = s.signature()
    if len(sigs) == 1:
        return sigs[0].to_json()
    return {"components": [dict(sig.to_json(), label=lab) for sig, lab in zip(sigs, s.labels)]}


def cmd_decompose(args):
    s = _load_surface(args.surface)
    dec = _decompose(s, args)
    return dec.to_json(Homology(s))


def cmd_twist(args):
    s = _load_surface(args.surface)
    dec = _decompose(s, args)
    cyls = _cylinders(args, dec)
    if args.standard:
        t = FieldElem(1, 0, s.d)
    elif args.t is not None:
        t = parse_elem(args.t, s.d)
    else:
        raise InvalidInput("give --t or --standard")
    if args.route == "cocycle":
        h = Homology(s)
        out = add_cocycle(s, twist_cocycle(h, dec, {i: t for i in cyls}), h)
    else:
        out = shear_cylinders(s, dec, cyls, t)
    return {"surface": out.to_json(), "digest": out.digest(), "route": args.route}


def cmd_stretch(args):
    s = _load_surface(args.surface)
    dec = _decompose(s, args)
    cyls = _cylinders(args, dec)
    sf = parse_elem(args.s, s.d)
    if args.route == "cocycle":
        h = Homology(s)
        out = add_cocycle(s, stretch_cocycle(h, dec, {i: sf for i in cyls}), h)
    else:
        out = stretch_cylinders(s, dec, cyls, sf)
    return {"surface": out.to_json(), "digest": out.digest(), "route": args.route}


def cmd_collapse(args):
    s = _load_surface(args.surface)
    dec = _decompose(s, args)
    res = collapse(s, dec, _ints(args.cylinders))
    out = res.to_json()
    out["limit_marked"] = [sig.marked for sig in res.limit.signature()]
    return out


def cmd_boundary_tangent(args):
    s = _load_surface(args.surface)
    dec = _decompose(s, args)
    res = collapse(s, dec, _ints(args.cylinders))
    model = _model(res.homology, args.model)
    bt = boundary_tangent(res, model)
    comps = {}
    for lab in res.limit.labels:
        pm = pushforward(bt, lab)
        comps[lab] = {"dim": pm.dim, "model": pm.to_json()}
    return {"dim_T": model.dim, "dim_boundary": bt.dim, "model": bt.to_json(), "components": comps}


def cmd_recognizable(args):
    s = _load_surface(args.surface)
    dec = _decompose(s, args)
    cfg = STConfig.load(json.loads(Path(args.config).read_text()), s.d)
    out = {"span_dim": recognizable_span(dec, cfg).dim}
    if args.t is not None:
        out["recognizable"] = is_recognizable(dec, _elems(args.t, s.d), cfg)
    return out


def cmd_rank(args):
    s = _load_surface(args.surface)
    h = Homology(s)
    return {"rank": rank(_model(h, args.model))}


def cmd_field(args):
    s = _load_surface(args.surface)
    h = Homology(s)
    return {"field": field_name(field_of_definition(_model(h, args.model)))}


def cmd_shortest(args):
    s = _load_surface(args.surface)
    scs = shortest_saddle_connections(s, parse_elem(args.bound, s.d))
    return {"count": len(scs), "saddle_connections": [sc.to_json() for sc in scs]}


def cmd_render(args):
    from .report import render_cylinder_bars, render_surface

    s = _load_surface(args.surface)
    dec = _decompose(s, args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = [render_surface(s, out_dir / "surface.png", dec, title=f"direction {args.dir}")]
    files.append(render_cylinder_bars(dec, out_dir / "cylinders.png"))
    report = {"decomposition": dec.to_json(Homology(s))}
    if args.cylinders:
        res = collapse(s, dec, _ints(args.cylinders))
        files.append(render_surface(res.limit, out_dir / "limit.png", title="collapsed limit"))
        report["collapse"] = res.to_json()
    report["figures"] = sorted(f.name for f in files)
    (out_dir / "report.json").write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    return {"report": str(out_dir / "report.json"), "figures": report["figures"]}


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flatcyl", description="Exact cylinder calculus on translation surfaces.")
    p.add_argument("--pretty", action="store_true", help="indent the JSON output")
    p.add_argument("--out", help="write the JSON output to this file instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_, direction=False):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("surface", help="surface JSON file")
        if direction:
            sp.add_argument("--dir", required=True, help="direction 'a,b' with exact entries")
            sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="crossing budget per trajectory")
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "check that a surface file is valid")
    add("signature", cmd_signature, "stratum of each component")
    add("decompose", cmd_decompose, "cylinder decomposition in a direction", True)
    sp = add("twist", cmd_twist, "shear cylinders", True)
    sp.add_argument("--cylinders", help="comma-separated cylinder indices (default all)")
    sp.add_argument("--t", help="shear time")
    sp.add_argument("--standard", action="store_true", help="apply the standard twist (t = 1)")
    sp.add_argument("--route", choices=["intrinsic", "cocycle"], default="intrinsic")
    sp = add("stretch", cmd_stretch, "stretch cylinders", True)
    sp.add_argument("--cylinders", help="comma-separated cylinder indices (default all)")
    sp.add_argument("--s", required=True, help="stretch parameter; heights scale by 1 + s")
    sp.add_argument("--route", choices=["intrinsic", "cocycle"], default="intrinsic")
    sp = add("collapse", cmd_collapse, "collapse parallel cylinders", True)
    sp.add_argument("--cylinders", required=True, help="comma-separated cylinder indices")
    sp = add("boundary-tangent", cmd_boundary_tangent, "tangent model of the boundary stratum", True)
    sp.add_argument("--cylinders", required=True, help="comma-separated cylinder indices")
    sp.add_argument("--model", required=True, help="model JSON file, or 'stratum' or 'gl2'")
    sp = add("recognizable", cmd_recognizable, "recognizable twists", True)
    sp.add_argument("--config", required=True, help="JSON file with S1 and S2")
    sp.add_argument("--t", help="comma-separated twist coefficients")
    sp = add("rank", cmd_rank, "rank of a model")
    sp.add_argument("--model", required=True, help="model JSON file, or 'stratum' or 'gl2'")
    sp = add("field-of-def", cmd_field, "field of definition of a model")
    sp.add_argument("--model", required=True, help="model JSON file, or 'stratum' or 'gl2'")
    sp = add("shortest", cmd_shortest, "saddle connections up to a length bound")
    sp.add_argument("--bound", required=True, help="length bound")
    sp = add("render", cmd_render, "write figures and a JSON report", True)
    sp.add_argument("--out-dir", required=True, help="directory for the figures and report.json")
    sp.add_argument("--cylinders", help="also collapse these cylinders and draw the limit")
    return p


def _error(code: str, message: str, obj=None) -> dict:
    return {"error": {"code": code, "message": message, "object": None if obj is None else repr(obj)}}


def run(argv=None) -> tuple[int, dict]:
    args = build_parser().parse_args(argv)
    try:
        return 0, args.func(args)
    except Undetermined as e:
        return 2, _error("undetermined", e.reason)
    except InvalidModel as e:
        return 3, _error("invalid_model", str(e))
    except SurfaceError as e:
        return 1, _error(e.code, str(e), e.obj)
    except (CollapseError, InvalidInput, ValueError, OSError) as e:
        return 1, _error(type(e).__name__, str(e))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    code, out = run(argv)
    text = json.dumps(out, sort_keys=True, indent=2 if args.pretty else None)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
