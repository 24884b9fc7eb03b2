"""Command-line interface.

Exit codes: 0 success or pass, 1 negative result, 2 input error,
3 internal inconsistency (for instance a constructed dome failing its own
verification).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import constructors
from .errors import DomeError, MeshFormatError, NotClosed, NotDomeable
from .geom import Tolerances, default_tolerances
from .io import read_mesh, to_json_text, to_obj, write_mesh
from .polygon import PolygonSpec, check_conditions
from .verifier import find_base_faces, verify_full

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


def _emit(data: dict):
    click.echo(json.dumps(data, indent=2, default=float))


def _tolerances() -> Tolerances:
    try:
        return default_tolerances()
    except ValueError as exc:
        raise InputError(f"DELTADOME_EPS: {exc}") from exc


def _parse_edges(text: str) -> PolygonSpec:
    try:
        return PolygonSpec(tuple(int(t) for t in text.replace(" ", "").split(",") if t))
    except ValueError as exc:
        raise InputError(f"bad --edges {text!r}: {exc}") from exc


def _polygon(edges: str | None, polygon: str | None) -> PolygonSpec:
    if (edges is None) == (polygon is None):
        raise InputError("give exactly one of --edges or a polygon JSON file")
    if edges is not None:
        return _parse_edges(edges)
    try:
        text = sys.stdin.read() if polygon == "-" else Path(polygon).read_text()
        return PolygonSpec.from_json(json.loads(text))
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read polygon {polygon}: {exc}") from exc


_polygon_options = [
    click.argument("polygon", required=False),
    click.option("--edges", help="Comma-separated integer edge lengths, e.g. 3,1,3,1."),
]


def polygon_input(fn):
    for opt in reversed(_polygon_options):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Deltahedral domes over equiangular integer polygons."""


@main.command()
@polygon_input
def decide(polygon, edges):
    """Decide whether a polygon can be domed and print the plan."""
    spec = _polygon(edges, polygon)
    try:
        report = check_conditions(spec)
    except NotClosed as exc:
        raise InputError(str(exc)) from exc
    out = {"polygon": spec.to_json(), "conditions": report.to_json()}
    try:
        plan = constructors.decide(spec)
    except NotDomeable as exc:
        out.update(domeable=False, reason=exc.reason)
        _emit(out)
        sys.exit(EXIT_NEGATIVE)
    out.update(domeable=True, plan=plan.to_json())
    _emit(out)


@main.command()
@polygon_input
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Output file (default stdout).")
@click.option("--format", "fmt", type=click.Choice(["obj", "json"]), default=None)
@click.option("--triangulate", is_flag=True, help="Emit unit triangles instead of merged faces.")
def build(polygon, edges, out_path, fmt, triangulate):
    """Construct a verified dome."""
    spec = _polygon(edges, polygon)
    tol = _tolerances()
    try:
        plan = constructors.decide(spec)
    except NotClosed as exc:
        raise InputError(str(exc)) from exc
    except NotDomeable as exc:
        click.echo(f"not domeable: {exc.reason}", err=True)
        sys.exit(EXIT_NEGATIVE)
    mesh = constructors.build(spec, plan, tol)
    report = verify_full(mesh, spec, tol)
    if not report.passed:
        click.echo(f"internal error: constructed dome failed verification: {report.failures}", err=True)
        sys.exit(EXIT_INTERNAL)
    if out_path:
        fmt = fmt or ("json" if out_path.lower().endswith(".json") else "obj")
        write_mesh(mesh, out_path, fmt, triangulate)
        click.echo(f"{plan.kind.value} dome: {mesh.n_vertices} vertices, {len(mesh.faces) - 1} dome faces -> {out_path}",
                   err=True)
    else:
        fmt = fmt or "obj"
        if fmt == "json":
            from .mesh import triangulate_units

            click.echo(to_json_text(triangulate_units(mesh) if triangulate else mesh))
        else:
            click.echo(to_obj(mesh, triangulate), nl=False)


@main.command()
@click.argument("mesh_file", type=click.Path(exists=False))
@click.option("--base-face", type=int, default=None, help="Override the base face index.")
@click.option("--polygon", "--edges", "edges", help="Expected base polygon edge lengths, e.g. 1,1,1,1,1.")
@click.option("--any-base", is_flag=True, help="Report every face that works as a base.")
def verify(mesh_file, base_face, edges, any_base):
    """Verify a mesh file (OBJ or JSON) and print the audit."""
    tol = _tolerances()
    try:
        mesh = read_mesh(mesh_file, base_face)
    except (OSError, MeshFormatError, ValueError) as exc:
        raise InputError(f"cannot read {mesh_file}: {exc}") from exc
    spec = _parse_edges(edges) if edges else None
    if any_base:
        good = find_base_faces(mesh, tol)
        _emit({"base_faces": good})
        sys.exit(EXIT_OK if good else EXIT_NEGATIVE)
    report = verify_full(mesh, spec, tol)
    _emit(report.to_json())
    sys.exit(EXIT_OK if report.passed else EXIT_NEGATIVE)


@main.command()
@polygon_input
@click.option("--max-dome-vertices", type=int, default=6, show_default=True)
@click.option("--max-flat", type=int, default=6, show_default=True, help="Flat interior lattice vertices allowed.")
@click.option("--max-templates", type=int, default=10**7, show_default=True)
@click.option("--restarts", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--relaxed/--strict", default=None, help="2-4 triangles per base corner (default: only when needed).")
@click.option("--time-limit", type=float, default=1800.0, show_default=True, help="Seconds.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Write the found mesh here.")
def search(polygon, edges, max_dome_vertices, max_flat, max_templates, restarts, seed, relaxed,
           time_limit, out_path):
    """Search dome templates numerically (empirical, one-sided)."""
    from .search import SearchBudget, search_dome

    spec = _polygon(edges, polygon)
    budget = SearchBudget(max_dome_vertices, max_flat, max_templates, restarts, seed, relaxed, time_limit)
    try:
        outcome = search_dome(spec, budget, _tolerances())
    except NotClosed as exc:
        raise InputError(str(exc)) from exc
    data = outcome.to_json()
    data.pop("mesh")
    _emit(data)
    if outcome.found is not None and out_path:
        write_mesh(outcome.found, out_path)
    sys.exit(EXIT_OK if outcome.found is not None else EXIT_NEGATIVE)


@main.command("gauss-check")
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--beta-min", type=float, default=120.0, show_default=True)
@click.option("--beta-max", type=float, default=180.0, show_default=True)
def gauss_check(samples, seed, beta_min, beta_max):
    """Sample vertex stars and check the Gauss-map normal properties."""
    from .gaussmap import analyze_vertex_star, sample_stars

    if not (0 < beta_min < beta_max <= 180):
        raise InputError("need 0 < beta-min < beta-max <= 180")
    reports = [analyze_vertex_star(s) for s in sample_stars(samples, seed, (beta_min, beta_max))]
    summary = {
        "samples": len(reports),
        "n2_up": sum(r.n2_up for r in reports),
        "side_down": sum(r.n1_or_n3_down for r in reports),
        "both_sides_down": sum(r.n1_down and r.n3_down for r in reports),
        "formula_agrees": sum(r.formula_agrees for r in reports),
        "min_arc_x_deg": min(r.arc_x_deg for r in reports),
        "max_arc_y_deg": max(r.arc_y_deg for r in reports),
    }
    _emit(summary)
    ok = summary["n2_up"] == summary["side_down"] == summary["formula_agrees"] == len(reports)
    sys.exit(EXIT_OK if ok else EXIT_NEGATIVE)


@main.command()
@click.argument("names", nargs=-1)
@click.option("--all", "export_all", is_flag=True, help="Export every fixture.")
@click.option("--list", "list_only", is_flag=True, help="List fixture names.")
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["obj", "json"]), default="obj", show_default=True)
@click.option("--triangulate", is_flag=True)
def export(names, export_all, list_only, out_dir, fmt, triangulate):
    """Write fixture meshes to files."""
    from .fixtures import fixture_names, load_fixture

    available = fixture_names()
    if list_only:
        click.echo("\n".join(available))
        return
    chosen = available if export_all else list(names)
    if not chosen:
        raise InputError("name at least one fixture, or pass --all / --list")
    unknown = [n for n in chosen if n not in available]
    if unknown:
        raise InputError(f"unknown fixtures: {', '.join(unknown)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in chosen:
        path = out / f"{name}.{fmt}"
        write_mesh(load_fixture(name), path, fmt, triangulate)
        click.echo(str(path))


def run():
    """Entry point mapping uncaught library errors to exit code 3."""
    try:
        main(standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code if isinstance(exc, InputError) else EXIT_INPUT)
    except click.exceptions.Abort:
        sys.exit(EXIT_INPUT)
    except DomeError as exc:
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)


if __name__ == "__main__":
    run()
