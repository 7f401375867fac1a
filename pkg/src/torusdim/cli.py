"""Command-line front end.

Exit status: 0 on success, 2 for unreadable or invalid input, 3 when the
diagram was truncated at a cap, 4 when positivity of some class is
undecided, 5 when some isolated-point verdict is undecided.  When several
apply the smallest nonzero code wins.
"""

from __future__ import annotations

import os
import sys

import click

from . import __version__
from .cantor import shrink_table, table_csv
from .catalog import CATALOG, catalog_spec
from .classes import ClassReport, loop_classes, to_dot
from .dims import (
    DimensionReport,
    isolated_report,
    point_symbolic,
    report_csv,
    report_json,
)
from .errors import NotInSupport, SpecError, TorusDimError
from .model import load_spec, parse_element, spec_report
from .netgen import DEFAULT_CAPS, TransitionDiagram, cached_closure
from .numberfield import format_element, nf_is_pisot

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TRUNCATED = 3
EXIT_POSITIVITY = 4
EXIT_ISOLATION = 5


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


def exit_code(diagram: TransitionDiagram, classes: ClassReport | None, dims: DimensionReport | None) -> int:
    if diagram.truncated:
        return EXIT_TRUNCATED
    if classes and any(c.positivity == "undecided-at-cap" for c in classes.classes):
        return EXIT_POSITIVITY
    if dims and dims.any_undecided:
        return EXIT_ISOLATION
    return EXIT_OK


def _load(spec_arg, mode):
    """A path to a spec file, or @name for a catalog example."""
    try:
        if spec_arg.startswith("@"):
            return catalog_spec(spec_arg[1:], mode)
        return load_spec(spec_arg, mode)
    except SpecError as exc:
        raise InputError(f"{spec_arg}: {exc}") from None
    except (KeyError, OSError) as exc:
        raise InputError(str(exc)) from None


def _caps(max_nodes, max_depth):
    caps = dict(DEFAULT_CAPS)
    if max_nodes is not None:
        caps["max_nodes"] = max_nodes
    if max_depth is not None:
        caps["max_depth"] = max_depth
    return caps


# -- report text ---------------------------------------------------------------------------


def _dim_text(sv, spec):
    lo, hi = sv.dim_bounds(spec)
    mid = (lo + hi) / 2
    return f"{float(mid):.9f} (+/- {float((hi - lo) / 2):.1e})"


def _matrix_lines(m, indent):
    s = m.scale
    scaled = [" ".join(f"{int(x * s) if (x * s).denominator == 1 else x * s}" for x in r) for r in m.entries]
    exact = [" ".join(str(x) for x in r) for r in m.entries]
    out = [f"{indent}x{s}: [" + "; ".join(scaled) + "]"]
    out.append(f"{indent}exact: [" + "; ".join(exact) + "]")
    return out


def _labels(diagram, path):
    return "[" + ", ".join(str(diagram.reduced_label(i)) for i in path) + "]"


def render_report(diagram, classes, dims=None) -> str:
    spec = diagram.spec
    ctx = spec.field
    rep = spec_report(spec)
    out = []
    out.append(f"ratio: root of {list(ctx.int_poly)} near {float(ctx.rho_float()):.12g}")
    out.append(f"mode: {spec.mode}")
    out.append("digits: " + ", ".join(format_element(d) for d in spec.digits))
    if spec.probs:
        out.append("probs: " + ", ".join(str(p) for p in spec.probs))
    out.append(f"delta: {format_element(spec.delta)}")
    out.append(
        f"regular: {rep.is_regular}; strong separation: {rep.strong_separation}; pisot: {rep.pisot_status}"
    )
    out.append("")
    summ = diagram.summary()
    out.append(f"reduced characteristic vectors: {summ['reduced']}")
    out.append(f"characteristic vectors: {summ['nodes']}")
    out.append(f"edges: {summ['edges']}")
    if diagram.truncated:
        out.append(f"TRUNCATED: {diagram.truncation_reason}")
        for w in diagram.witness:
            out.append(f"  {w}")
    out.append("")
    for lab, vec in enumerate(diagram.reduced_vectors(), 1):
        out.append(f"  {lab}: {vec.describe_reduced()}")
    out.append("")
    if spec.probs:
        out.append(f"transition matrices (scaled by {diagram.display_scale}, then exact):")
        done = set()
        for e in diagram.edge_list():
            key = (diagram.reduced_label(e.parent), e.position)
            if key in done:
                continue
            done.add(key)
            m = diagram.edge_matrix(e)
            out.append(f"  T({key[0]},{diagram.reduced_label(e.child)}) child {e.position}:")
            out.extend(_matrix_lines(m, "    "))
        out.append("")
    out.append(f"essential classes: {classes.n_essential}")
    dims_of = {}
    if dims:
        dims_of = {cd.cls.nodes: cd for cd in dims.classes}
    for c in classes.essential:
        out.extend(_class_lines(diagram, c, dims_of.get(c.nodes)))
    out.append(f"non-essential maximal loop classes: {len(classes.maximal)}")
    for c in classes.maximal:
        out.extend(_class_lines(diagram, c, dims_of.get(c.nodes)))
    if dims:
        iso = dims.isolated_dims()
        out.append("")
        out.append("isolated dimensions: " + ("{" + ", ".join(f"{x:.9f}" for x in iso) + "}" if iso else "none"))
        out.append(f"components of the bounding set: {dims.components()}")
    warnings = list(dims.warnings if dims else classes.warnings)
    if warnings:
        out.append("")
        out.append("warnings:")
        out.extend(f"  {w}" for w in warnings)
    return "\n".join(out) + "\n"


def _class_lines(diagram, c, cd):
    spec = diagram.spec
    out = [f"  {c.label()} {c.kind}; full nodes {list(c.nodes)}"]
    wit = f" via {_labels(diagram, c.witness)}" if c.witness else ""
    out.append(f"    positivity: {c.positivity}{wit}")
    if cd is None or cd.inner is None:
        return out
    inn = cd.inner
    if c.simple and not c.essential:
        out.append(f"    periodic dim: {_dim_text(inn.max_value, spec)}")
    else:
        out.append(
            f"    inner dims [{inn.dim_lo:.9f}, {inn.dim_hi:.9f}] from loops "
            f"{_labels(diagram, inn.witness_lo)} and {_labels(diagram, inn.witness_hi)}"
            f" ({inn.n_cycles} loops{', partial' if inn.partial else ''})"
        )
        out.append(f"      lower end {_dim_text(inn.max_value, spec)}, upper end {_dim_text(inn.min_value, spec)}")
    if cd.outer is not None:
        o = cd.outer
        out.append(f"    outer dims [{o.dim_lo:.9f}, {o.dim_hi:.9f}]")
        out.append(f"      from {o.upper.describe()}")
        if o.lower is not None:
            out.append(f"      and {o.lower.describe()}")
    if cd.verdict:
        out.append(f"    verdict: {cd.verdict}{'; ' + cd.note if cd.note else ''}")
    return out


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# -- commands ------------------------------------------------------------------------------

_spec_arg = click.argument("spec")
_mode_opt = click.option("--mode", type=click.Choice(["torus", "line"]), default=None, help="Override the spec's mode.")
_cap_opts = [
    click.option("--max-nodes", type=int, default=None, help=f"Node cap (default {DEFAULT_CAPS['max_nodes']})."),
    click.option("--max-depth", type=int, default=None, help=f"Depth cap (default {DEFAULT_CAPS['max_depth']})."),
    click.option("--cache", "cache_dir", type=click.Path(file_okay=False), default=None, help="Diagram cache directory."),
]


def _with_caps(f):
    for opt in reversed(_cap_opts):
        f = opt(f)
    return f


@click.group()
@click.version_option(__version__)
def main():
    """Local dimensions of self-similar measures and their quotients on the torus."""


@main.command()
@_spec_arg
@_mode_opt
@_with_caps
@click.option("--cycle-len", default=6, show_default=True, help="Longest closed walk used for inner intervals.")
@click.option("--depth-lo", default=8, show_default=True, help="Path length for the lower spectral bound.")
@click.option("--depth-hi", default=8, show_default=True, help="Path length for the upper spectral bound.")
@click.option("--lower-norm", type=click.Choice(["col", "row", "auto"]), default="auto", show_default=True)
@click.option("--upper-norm", type=click.Choice(["col", "row", "sum", "auto"]), default="auto", show_default=True)
@click.option("--subset", default="search", show_default=True, help="'search', 'all' or comma list of 1-based positions.")
@click.option("--path-cap", default=1_000_000, show_default=True, help="Most paths enumerated per bound.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Write artifacts here.")
def analyze(spec, mode, max_nodes, max_depth, cache_dir, cycle_len, depth_lo, depth_hi, lower_norm, upper_norm, subset, path_cap, out_dir):
    """Diagram, loop classes, dimension intervals and isolated points."""
    s = _load(spec, mode)
    diagram = cached_closure(s, _caps(max_nodes, max_depth), cache_dir)
    classes = loop_classes(diagram)
    dims = None
    if s.has_probs and not diagram.truncated:
        sub = _parse_subset(subset)
        dims = isolated_report(
            diagram, classes, None, cycle_len, depth_lo, depth_hi, lower_norm, upper_norm, sub, path_cap
        )
    text = render_report(diagram, classes, dims)
    click.echo(text, nl=False)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        _write(os.path.join(out_dir, "report.txt"), text)
        _write(os.path.join(out_dir, "diagram.dot"), to_dot(diagram, classes))
        _write(os.path.join(out_dir, "result.json"), report_json(diagram, classes, dims))
        if dims:
            _write(os.path.join(out_dir, "dims.csv"), report_csv(diagram, dims))
    sys.exit(exit_code(diagram, classes, dims))


def _parse_subset(text):
    if text in ("search", "all"):
        return None if text == "all" else "search"
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise click.BadParameter(f"bad subset {text!r}") from None


@main.command()
@_spec_arg
@_mode_opt
@_with_caps
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def diagram(spec, mode, max_nodes, max_depth, cache_dir, output):
    """Write the reduced transition diagram as DOT."""
    s = _load(spec, mode)
    d = cached_closure(s, _caps(max_nodes, max_depth), cache_dir)
    classes = loop_classes(d)
    dot = to_dot(d, classes)
    if output:
        _write(output, dot)
    else:
        click.echo(dot, nl=False)
    sys.exit(exit_code(d, classes, None))


@main.command()
@_spec_arg
@_mode_opt
@_with_caps
@click.option("--cycle-len", default=6, show_default=True)
@click.option("--depth-lo", default=8, show_default=True)
@click.option("--depth-hi", default=8, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
def dims(spec, mode, max_nodes, max_depth, cache_dir, cycle_len, depth_lo, depth_hi, fmt):
    """Dimension intervals per loop class as CSV or JSON."""
    s = _load(spec, mode)
    if not s.has_probs:
        raise InputError("the spec has no probabilities")
    d = cached_closure(s, _caps(max_nodes, max_depth), cache_dir)
    classes = loop_classes(d)
    rep = None
    if not d.truncated:
        rep = isolated_report(d, classes, None, cycle_len, depth_lo, depth_hi)
    if fmt == "json":
        click.echo(report_json(d, classes, rep), nl=False)
    elif rep is not None:
        click.echo(report_csv(d, rep), nl=False)
    sys.exit(exit_code(d, classes, rep))


@main.command()
@_spec_arg
@click.argument("x")
@_mode_opt
@_with_caps
@click.option("--depth", default=40, show_default=True)
def point(spec, x, mode, max_nodes, max_depth, cache_dir, depth):
    """Local dimension at X (a rational or a polynomial in r)."""
    s = _load(spec, mode)
    if not s.has_probs:
        raise InputError("the spec has no probabilities")
    d = cached_closure(s, _caps(max_nodes, max_depth), cache_dir)
    if d.truncated:
        click.echo(f"diagram truncated: {d.truncation_reason}", err=True)
        sys.exit(EXIT_TRUNCATED)
    try:
        val = parse_element(x, s.field)
        res = point_symbolic(d, val, depth)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None
    except NotInSupport as exc:
        raise InputError(str(exc)) from None
    click.echo(f"x: {format_element(res.x)}")
    for path, per in zip(res.paths, res.periodic):
        shown = _labels(d, path[: min(len(path), 12)]) + ("..." if len(path) > 12 else "")
        if per is None:
            click.echo(f"path: {shown} (no period found)")
        else:
            click.echo(f"path: {shown} period {_labels(d, per.cycle)} dim {_dim_text(per.value, s)}")
    if res.exact:
        click.echo(f"local dimension: {res.dim:.9f} (exact, periodic)")
    click.echo(f"estimate at depth {res.depth}: {res.estimate:.9f}")
    if res.estimate_adjacent is not None:
        click.echo(f"estimate with adjacent intervals: {res.estimate_adjacent:.9f}")


def _range(text):
    a, _, b = text.partition(":")
    lo = int(a)
    hi = int(b) if b else lo
    return range(lo, hi + 1)


@main.command("cantor-table")
@click.option("--d-range", default="3:6", show_default=True, help="lo:hi, inclusive.")
@click.option("--m-range", default="3:6", show_default=True, help="lo:hi, inclusive.")
@click.option("--pair", "pairs", multiple=True, help="Extra m,d pair; may repeat.")
@click.option("--with-flagged", is_flag=True, help="Also emit the m = d-1 rows.")
@click.option("--max-depth", default=4, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def cantor_table(d_range, m_range, pairs, with_flagged, max_depth, output):
    """Line lower bound vs torus upper bound for Cantor convolutions."""
    want = []
    for d in _range(d_range):
        if with_flagged and d - 1 >= 2:
            want.append((d - 1, d))
        for m in _range(m_range):
            if m >= d:
                want.append((m, d))
    for p in pairs:
        m, d = (int(v) for v in p.split(","))
        if (m, d) not in want:
            want.append((m, d))
    rows = shrink_table(want, max_depth=max_depth)
    text = table_csv(rows)
    if output:
        _write(output, text)
    else:
        click.echo(text, nl=False)


@main.command("check-pisot")
@click.argument("coeffs")
def check_pisot(coeffs):
    """Is the root of COEFFS (comma list, highest degree first) a Pisot number?"""
    try:
        poly = [int(c) for c in coeffs.split(",")]
    except ValueError:
        raise click.BadParameter("coefficients must be integers") from None
    try:
        cert = nf_is_pisot(poly)
    except TorusDimError as exc:
        raise InputError(str(exc)) from None
    click.echo(f"{cert.status}: {cert.reason}")
    if cert.dominant_root:
        click.echo(f"dominant root: {cert.dominant_root[0]:.12g}")
    for mod, _ in cert.conjugate_moduli:
        click.echo(f"conjugate modulus: {mod:.12g}")
    sys.exit(0 if cert.status == "pisot" else 1)


@main.command("examples")
def examples():
    """List the built-in example specs (use them as @name)."""
    for name in sorted(CATALOG):
        click.echo(name)


if __name__ == "__main__":
    main()
