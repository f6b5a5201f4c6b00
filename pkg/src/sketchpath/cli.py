"""Command line entry point: ``sketchpath <command> ...``.

Exit codes: 0 on success, 1 for bad input (domain, points, eps), 2 when the
query points are not connected.
"""

from __future__ import annotations

import csv
import json
import logging
import sys
import time
from pathlib import Path

import click
import numpy as np

from .errors import DomainError, GeometryError, InvalidEpsilon, IoError, Unreachable
from .geometry import Point, PolyPath
from .io import DomainFile, parse_domain_file

EXIT_INPUT = 1
EXIT_UNREACHABLE = 2


def _load(path: str) -> tuple[DomainFile, object]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise click.ClickException(f"cannot read {path}: {exc}") from exc
    df = parse_domain_file(text)
    return df, df.domain()


def _point(spec: str | None, df: DomainFile | None, default: str) -> Point:
    spec = spec or default
    if df is not None and spec in df.points:
        return Point(*df.points[spec])
    try:
        x, y = (float(v) for v in spec.split(","))
    except ValueError as exc:
        raise click.BadParameter(f"{spec!r} is neither 'x,y' nor a named point") from exc
    return Point(x, y)


def _path_json(path: PolyPath) -> dict:
    return {
        "length": path.length,
        "waypoints": [list(map(float, p)) for p in path.waypoints],
        "segment_kinds": [k.value for k in path.segment_kinds],
    }


class _Group(click.Group):
    """Maps package errors to exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except Unreachable as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_UNREACHABLE)
        except (DomainError, GeometryError, InvalidEpsilon, IoError) as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_INPUT)


@click.group(cls=_Group)
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Approximate shortest paths amid polygonal obstacles."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")


def _solve(domain, s, t, eps, mode):
    from .corridors import approx_shortest_path_simple
    from .pipeline import approx_shortest_path_convex

    if mode == "auto":
        mode = "convex" if domain.all_convex() else "simple"
    if mode == "convex":
        return approx_shortest_path_convex(domain.convexified(), s, t, eps)
    return approx_shortest_path_simple(domain, s, t, eps)


@main.command()
@click.argument("domain_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--from", "src", help="Start as 'x,y' or a point name in the file (default 's').")
@click.option("--to", "dst", help="Target as 'x,y' or a point name (default 't').")
@click.option("--eps", default=0.5, show_default=True, type=float)
@click.option("--mode", type=click.Choice(["auto", "convex", "simple"]), default="auto", show_default=True)
@click.option("--svg", "svg_out", type=click.Path(dir_okay=False), help="Write a figure.")
@click.option("--json-out", type=click.Path(dir_okay=False), help="Write the path as JSON.")
def path(domain_file, src, dst, eps, mode, svg_out, json_out):
    """Single-shot (1+eps)-approximate shortest path."""
    df, domain = _load(domain_file)
    s, t = _point(src, df, "s"), _point(dst, df, "t")
    t0 = time.perf_counter()
    res = _solve(domain, s, t, eps, mode)
    doc = _path_json(res.path) | {"eps": eps, "seconds": time.perf_counter() - t0}
    text = json.dumps(doc)
    if json_out:
        Path(json_out).write_text(text + "\n", encoding="utf-8")
    click.echo(text)
    if svg_out:
        from .svg import emit_svg

        emit_svg(domain, svg_out, paths={f"approx (eps={eps})": res.path}, points={"s": s, "t": t})


@main.command()
@click.argument("domain_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--eps", default=0.5, show_default=True, type=float)
@click.option("--mode", type=click.Choice(["single_shot", "two_point_query"]), default="single_shot", show_default=True)
@click.option("--from", "src", help="Start point for a non-convex sketch (default 's').")
@click.option("--to", "dst", help="Target point for a non-convex sketch (default 't').")
@click.option("--svg", "svg_out", type=click.Path(dir_okay=False))
@click.option("--json-out", type=click.Path(dir_okay=False))
def sketch(domain_file, eps, mode, src, dst, svg_out, json_out):
    """Build the obstacle sketch and print its statistics."""
    from .sketch import build_sketch, make_params

    df, domain = _load(domain_file)
    params = make_params(eps, mode)
    if domain.all_convex():
        sk = build_sketch(domain, params)
    else:
        from .corridors import simple_sketch

        sk = simple_sketch(domain, _point(src, df, "s"), _point(dst, df, "t"), params)
    doc = {
        "eps": eps,
        "mode": params.mode.value,
        "eps_prime": params.eps_prime,
        "patch_angle": params.patch_angle,
        "cone_count": params.cone_count,
        "h": domain.h,
        "n": domain.n,
        "coreset_total": sk.total_coreset_size,
        "coresets": [list(map(int, c.original_indices)) for c in sk.corepolygons],
        "corridor_paths": len(sk.corridor_paths),
    }
    text = json.dumps(doc)
    if json_out:
        Path(json_out).write_text(text + "\n", encoding="utf-8")
    click.echo(json.dumps({k: v for k, v in doc.items() if k != "coresets"}))
    if svg_out:
        from .svg import emit_svg

        emit_svg(domain, svg_out, sketch=sk)


@main.command()
@click.argument("domain_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--eps", default=0.662, show_default=True, type=float)
@click.option("-o", "--out", "out", required=True, type=click.Path(dir_okay=False))
def preprocess(domain_file, eps, out):
    """Build a two-point query structure (convex obstacles)."""
    from .query import preprocess as build, save_structure

    _, domain = _load(domain_file)
    t0 = time.perf_counter()
    qs = build(domain.convexified() if domain.all_convex() else domain, eps)
    try:
        Path(out).write_text(save_structure(qs), encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {out}: {exc}") from exc
    click.echo(json.dumps(qs.storage() | {"max_stretch": qs.planar.max_stretch, "seconds": time.perf_counter() - t0}))


@main.command()
@click.argument("structure_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--from", "src", required=True, help="'x,y'")
@click.option("--to", "dst", required=True, help="'x,y'")
def query(structure_file, src, dst):
    """Approximate distance from a preprocessed structure."""
    from .query import load_structure, query_distance

    qs = load_structure(Path(structure_file).read_text(encoding="utf-8"))
    d, witness = query_distance(qs, _point(src, None, ""), _point(dst, None, ""))
    click.echo(json.dumps({"distance": d, "witness": witness}))


@main.command()
@click.argument("domain_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--from", "src")
@click.option("--to", "dst")
@click.option("--json-out", type=click.Path(dir_okay=False))
def oracle(domain_file, src, dst, json_out):
    """Exact shortest path (visibility graph)."""
    from .oracle import exact_shortest_path

    df, domain = _load(domain_file)
    length, p = exact_shortest_path(domain, _point(src, df, "s"), _point(dst, df, "t"))
    text = json.dumps(_path_json(p))
    if json_out:
        Path(json_out).write_text(text + "\n", encoding="utf-8")
    click.echo(text)


@main.command()
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--h", "h", default=5, show_default=True, type=int, help="Number of obstacles.")
@click.option("--vertices", default=20, show_default=True, type=int, help="Vertices per obstacle.")
@click.option("--convexity", type=click.Choice(["convex", "simple"]), default="convex", show_default=True)
@click.option("--points/--no-points", default=True, show_default=True, help="Add random free points s and t.")
@click.option("-o", "--out", "out", type=click.Path(dir_okay=False), help="Output file (default stdout).")
def gen(seed, h, vertices, convexity, points, out):
    """Generate a random instance as a domain file."""
    from .generate import generate_instance, random_free_point

    df = generate_instance(seed, h, vertices, convexity)
    if points:
        rng = np.random.default_rng(seed + 1)
        dom = df.domain()
        df.points = {k: tuple(map(float, random_free_point(dom, rng))) for k in ("s", "t")}
    text = df.to_json()
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--seeds", default="0-4", show_default=True, help="Seed range 'a-b' (inclusive) or list 'a,b,c'.")
@click.option("--h", "h", default=5, show_default=True, type=int)
@click.option("--vertices", default=20, show_default=True, type=int)
@click.option("--convexity", type=click.Choice(["convex", "simple"]), default="convex", show_default=True)
@click.option("--eps", default=0.5, show_default=True, type=float)
@click.option("--pairs", default=3, show_default=True, type=int, help="Query pairs per instance.")
def bench(seeds, h, vertices, convexity, eps, pairs):
    """Stretch and runtime table as CSV on stdout."""
    from .generate import generate_instance, random_free_point
    from .lift import validate_path
    from .oracle import build_visibility_graph, exact_shortest_path

    if "-" in seeds:
        a, b = (int(v) for v in seeds.split("-"))
        seed_list = list(range(a, b + 1))
    else:
        seed_list = [int(v) for v in seeds.split(",")]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["seed", "h", "n", "eps", "pair", "exact", "approx", "stretch", "valid", "approx_s", "exact_s"])
    for seed in seed_list:
        domain = generate_instance(seed, h, vertices, convexity).domain()
        rng = np.random.default_rng(seed + 1)
        vg = build_visibility_graph(domain)
        for k in range(pairs):
            s, t = random_free_point(domain, rng), random_free_point(domain, rng)
            t0 = time.perf_counter()
            exact, _ = exact_shortest_path(domain, s, t, vg=vg)
            t1 = time.perf_counter()
            res = _solve(domain, s, t, eps, "auto")
            t2 = time.perf_counter()
            stretch = res.length / exact if exact > 0 else 1.0
            w.writerow(
                [seed, domain.h, domain.n, eps, k, f"{exact:.9f}", f"{res.length:.9f}", f"{stretch:.6f}",
                 int(validate_path(res.path, domain)), f"{t2 - t1:.4f}", f"{t1 - t0:.4f}"]
            )


if __name__ == "__main__":  # pragma: no cover
    main()
