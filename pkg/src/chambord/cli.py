"""Batch command line frontend: parse, compute, audit, export.

Subcommands::

    parse | reduce | mul | inv | eq | forget | ball | audit | stab |
    project | witness | selftest | render

Inputs are inline presentation text, catalog names, or JSON files using the
schemas of the library modules.  All randomised commands take an explicit
seed and fixed inputs produce byte-identical artifacts.  Exit codes: 0 on
success, 1 on a domain error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import action as ac
from . import braid as br
from . import complex as cx
from . import diagram as dg
from . import selftest as st
from .errors import ChambordError, SchemaError
from .grammar import PForest, Presentation, catalog, eta, parse_presentation


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc


def _dump(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _load_diagram(path: str) -> dg.ClosedDiagram:
    try:
        return dg.ClosedDiagram.from_obj(_load_json(path))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"{path} is not a diagram file: {exc}") from exc


def _load_vertex(path: str) -> cx.VertexRef:
    try:
        return cx.vertex_of(cx.OpenDiagram.from_obj(_load_json(path)))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"{path} is not an open-diagram file: {exc}") from exc


def _resolve_presentation(args) -> tuple[Presentation, tuple]:
    if getattr(args, "catalog", None):
        return catalog(args.catalog)
    if getattr(args, "presentation", None):
        pres = parse_presentation(args.presentation)
        if not getattr(args, "baseword", None):
            raise SchemaError("--baseword is required with --presentation")
        return pres, pres.word(args.baseword)
    raise SchemaError("give either --catalog or --presentation")


def _cmd_parse(args) -> int:
    if args.catalog:
        pres, w = catalog(args.catalog)
        _dump({"presentation": pres.to_obj(), "baseword": list(w)}, args.out)
        return 0
    pres = parse_presentation(args.presentation)
    obj = {"presentation": pres.to_obj()}
    if args.baseword:
        obj["baseword"] = list(pres.word(args.baseword))
    _dump(obj, args.out)
    return 0


def _cmd_reduce(args) -> int:
    d = _load_diagram(args.diagram)
    _dump(dg.reduce(d).to_obj(), args.out)
    return 0


def _cmd_mul(args) -> int:
    a = _load_diagram(args.left)
    b = _load_diagram(args.right)
    _dump(dg.multiply(a, b).to_obj(), args.out)
    return 0


def _cmd_inv(args) -> int:
    d = _load_diagram(args.diagram)
    _dump(dg.reduce(dg.inverse(d)).to_obj(), args.out)
    return 0


def _cmd_eq(args) -> int:
    a = _load_diagram(args.left)
    b = _load_diagram(args.right)
    same = dg.reduce(a) == dg.reduce(b)
    print("equal" if same else "different")
    return 0


def _cmd_forget(args) -> int:
    d = _load_diagram(args.diagram)
    s = dg.forget(d)
    _dump(
        {
            "top": s.top.to_obj(),
            "bot": s.bot.to_obj(),
            "shift": s.shift,
            "balanced": s.balanced,
        },
        args.out,
    )
    return 0


def _cmd_ball(args) -> int:
    pres, w = _resolve_presentation(args)
    b = cx.ball(cx.base_vertex(pres, w), args.radius, args.budget)
    if args.format == "dot":
        text = b.to_dot()
        if args.out:
            Path(args.out).write_text(text + "\n", encoding="utf-8")
        else:
            print(text)
    else:
        _dump(b.to_obj(), args.out)
    return 0


def _audit_figure(b: cx.Ball, report: cx.AuditReport, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "chambord"
    heights = b.heights()
    levels = sorted(set(heights))
    counts = [heights.count(h) for h in levels]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.2))
    ax1.bar(levels, counts, color="#44679f")
    ax1.set_xlabel("height")
    ax1.set_ylabel("vertices")
    ax1.set_title(f"ball radius {b.radius}: {len(b.vertices)} vertices")
    names = list(report.checks)
    ax2.barh(
        range(len(names)),
        [1] * len(names),
        color=["#3d8c40" if report.checks[n]["passed"] else "#b03030" for n in names],
    )
    ax2.set_yticks(range(len(names)))
    ax2.set_yticklabels(names, fontsize=8)
    ax2.set_xticks([])
    ax2.set_title("audit checks")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _cmd_audit(args) -> int:
    pres, w = _resolve_presentation(args)
    b = cx.ball(cx.base_vertex(pres, w), args.radius, args.budget)
    report = cx.audit_cat0(b)
    outdir = Path(args.out) if args.out else Path(".")
    outdir.mkdir(parents=True, exist_ok=True)
    _dump(
        {
            "radius": args.radius,
            "vertices": len(b.vertices),
            "edges": len(b.edges),
            "audit": report.to_obj(),
        },
        str(outdir / "audit.json"),
    )
    with open(outdir / "audit.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["check", "passed"])
        for name, c in sorted(report.checks.items()):
            writer.writerow([name, "yes" if c["passed"] else "no"])
    _audit_figure(b, report, outdir / "audit.svg")
    print(f"audit {'passed' if report.all_passed else 'FAILED'}: "
          f"{len(b.vertices)} vertices, {len(b.edges)} edges")
    return 0 if report.all_passed else 1


def _cmd_stab(args) -> int:
    g = _load_diagram(args.element)
    v = _load_vertex(args.vertex)
    print("stabilizes" if ac.stabilizes(dg.reduce(g), v) else "moves")
    return 0


def _load_forest(path: str) -> PForest:
    obj = _load_json(path)
    try:
        pres = Presentation.from_obj(obj["presentation"])
        return PForest.from_obj(pres, obj["forest"])
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"{path} is not a forest file: {exc}") from exc


def _cmd_project(args) -> int:
    g = _load_diagram(args.element)
    f = _load_forest(args.forest)
    _dump(ac.project(dg.reduce(g), f).to_obj(), args.out)
    return 0


def _cmd_witness(args) -> int:
    report = ac.wreath_witness(args.catalog or "lamplighter", args.depth)
    _dump(report.to_obj(), args.out)
    return 0 if report.passed else 1


def _cmd_selftest(args) -> int:
    results = st.run_selftest(args.budget, args.seed, canary=not args.no_canary)
    for r in results:
        print(r.line())
    if args.out:
        _dump([r.to_obj() for r in results], args.out)
    return 0 if all(r.passed for r in results) else 1


def _strand_paths(b: br.CylBraid):
    """Slot trajectories of every strand, top to bottom, one step per letter."""
    slots = list(range(b.p))  # slots[i] = strand currently at slot i
    paths = {i: [(0.0, i)] for i in range(b.p)}
    letters = list(reversed(b.letters))  # time order
    for t, l in enumerate(letters, start=1):
        k = abs(l) - 1
        a, c = slots[k], slots[k + 1]
        slots[k], slots[k + 1] = c, a
        for i in range(b.p):
            paths[slots[i]].append((float(t), i))
    return paths, max(1, len(letters))


def _cmd_render(args) -> int:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "chambord"
    d = _load_diagram(args.diagram)
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.set_axis_off()

    def draw_forest(forest: PForest, y0: float, direction: float):
        order = {v: i for i, (v, _) in enumerate(forest.vertex_order())}

        def xy(vid):
            depth = len(vid[1])
            return order[vid], y0 + direction * (1.0 + 0.6 * depth)

        for vid, _kind in forest.vertex_order():
            x, y = xy(vid)
            parent = forest.parent(vid)
            if parent is not None:
                px_, py_ = xy(parent)
                ax.plot([px_, x], [py_, y], color="#555555", lw=1)
            color = "#222222" if forest.is_interior(vid) else "#2e7d32"
            ax.plot([x], [y], marker="o", ms=3, color=color)
        return order

    height = 4.0
    top_order = draw_forest(d.top, height, 1.0)
    bot_order = draw_forest(d.bot, 0.0, -1.0)
    # cylinder frame
    width = max(len(top_order), len(bot_order), 1)
    ax.plot([-0.7, width - 0.3], [height, height], color="#999999", lw=1)
    ax.plot([-0.7, width - 0.3], [0, 0], color="#999999", lw=1)

    paths, steps = _strand_paths(d.braid)
    top_int = d.top.interiors()
    bot_int = d.bot.interiors()
    for strand, pts in sorted(paths.items()):
        xs = [top_order[top_int[strand]]]
        ys = [height]
        for t, slot in pts:
            xs.append(bot_order[bot_int[slot]] if t == steps else slot + 0.0)
            ys.append(height - (t / steps) * height if steps else 0.0)
        end_slot = pts[-1][1]
        xs.append(bot_order[bot_int[end_slot]])
        ys.append(0.0)
        ax.plot(xs, ys, lw=1.4)
    q = d.braid.q
    top_leaves = d.top.leaves()
    bot_leaves = d.bot.leaves()
    for s in range(q):
        x0 = top_order[top_leaves[s]]
        x1 = bot_order[bot_leaves[(s + d.braid.rot) % q]]
        ax.plot([x0, x1], [height, 0.0], color="#2e7d32", lw=0.8, ls="--")
    ax.set_title(f"p={d.braid.p} q={q} rot={d.braid.rot}", fontsize=9)
    out = args.out or "diagram.svg"
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)
    print(out)
    return 0


def _add_source_args(sp, need_radius=False):
    sp.add_argument("--presentation", "-p", help="inline presentation text")
    sp.add_argument("--baseword", "-w", help="baseword (whitespace-separated letters)")
    sp.add_argument("--catalog", help="catalog preset name")
    if need_radius:
        sp.add_argument("--radius", type=int, required=True)
        sp.add_argument("--budget", type=int, default=None, help="vertex cap")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chambord", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="parse and validate a presentation")
    sp.add_argument("presentation", nargs="?", help="inline presentation text")
    sp.add_argument("--catalog")
    sp.add_argument("--baseword", "-w")
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_parse)

    for name, fn, files in (
        ("reduce", _cmd_reduce, ["diagram"]),
        ("inv", _cmd_inv, ["diagram"]),
        ("forget", _cmd_forget, ["diagram"]),
    ):
        sp = sub.add_parser(name)
        for f in files:
            sp.add_argument(f)
        sp.add_argument("--out")
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("mul", help="concatenate two diagrams")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_mul)

    sp = sub.add_parser("eq", help="decide equality of two diagrams")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.set_defaults(fn=_cmd_eq)

    sp = sub.add_parser("ball", help="breadth-first ball around the base vertex")
    _add_source_args(sp, need_radius=True)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=["json", "dot"], default="json")
    sp.set_defaults(fn=_cmd_ball)

    sp = sub.add_parser("audit", help="curvature audits on a ball")
    _add_source_args(sp, need_radius=True)
    sp.add_argument("--out", help="output directory")
    sp.set_defaults(fn=_cmd_audit)

    sp = sub.add_parser("stab", help="does the element stabilise the vertex?")
    sp.add_argument("element")
    sp.add_argument("vertex")
    sp.set_defaults(fn=_cmd_stab)

    sp = sub.add_parser("project", help="strand projection onto a forest")
    sp.add_argument("element")
    sp.add_argument("forest")
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_project)

    sp = sub.add_parser("witness", help="commuting shifted twists")
    sp.add_argument("--catalog", default="lamplighter")
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_witness)

    sp = sub.add_parser("selftest", help="run the seeded property suites")
    sp.add_argument("--budget", type=float, default=0.1)
    sp.add_argument("--seed", type=int, default=st.DEFAULT_SEED)
    sp.add_argument("--no-canary", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_selftest)

    sp = sub.add_parser("render", help="draw a diagram to SVG")
    sp.add_argument("diagram")
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_render)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ChambordError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
