"""Command-line surface over the library operations.

Every number in the output comes from a library call; the commands only
collect parameters, dispatch (optionally across threads for sweeps), and
format the records.  JSON output carries ``params``, ``results`` and
``diagnostics``; CSV output is the flattened results table alone.
"""

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from .cylinder import (
    calibrate_kernel,
    cyl_curvature,
    cyl_kernel,
    cyl_symbol,
    kernel_multiplier,
    periodized_kernel,
)
from .delaunay import (
    PeriodicGridFunction,
    bifurcation_period,
    bubble_tower_defect,
    continue_branch,
    functional_FL,
    solve_delaunay,
)
from .errors import (
    ConflapError,
    ParameterError,
    SingularityError,
    SupportError,
    TaperError,
)
from .euclidean import (
    LineGridFunction,
    cached_integral_constant,
    commutator_check,
    covariance_bridge,
    frac_lap_integral,
    frac_lap_spectral,
)
from .extension import (
    d_s_const,
    d_star_const,
    solve_extension_mode,
    weighted_volume_coefficient,
)
from .params import FracParams
from .sphere import (
    ModeSpectrum,
    calibrate_sphere_kernel,
    gjms_symbol,
    sphere_curvature,
    sphere_kernel,
    sphere_symbol,
    vol_sphere,
)

_VALIDATION_ERRORS = (
    ParameterError,
    SupportError,
    TaperError,
    SingularityError,
    ValueError,
    OSError,
)

PERIOD_THRESHOLD_REFERENCE = 5.1538187584122886
"""Root of xi coth(pi xi / 2) = 4 / pi as a period, for the self test."""


def _thread_limit(count):
    raw = os.environ.get("CONFLAP_THREADS", "").strip()
    if raw:
        try:
            limit = int(raw)
        except ValueError:
            raise ParameterError(
                f"CONFLAP_THREADS must be an integer, got {raw!r}"
            ) from None
    else:
        limit = os.cpu_count() or 1
    return max(1, min(limit, count))


def _sweep(fn, items):
    """Map fn over items, keeping input order regardless of completion."""
    items = list(items)
    if not items:
        return []
    workers = _thread_limit(len(items))
    if workers == 1 or len(items) == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _emit(fmt, output, params, results, diagnostics):
    if fmt == "json":
        payload = {
            "params": params,
            "results": results,
            "diagnostics": diagnostics,
        }
        text = json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"
    else:
        buffer = io.StringIO()
        if results:
            writer = csv.DictWriter(
                buffer,
                fieldnames=list(results[0].keys()),
                lineterminator="\n",
            )
            writer.writeheader()
            writer.writerows(results)
        text = buffer.getvalue()
    with click.open_file(output, "w") as handle:
        handle.write(text)


def _run_params(ctx, command, **kw):
    out = {"command": command, "seed": ctx.obj["seed"]}
    out.update(kw)
    return out


_format_option = click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "csv"]),
    default="json",
    show_default=True,
    help="Output format.",
)
_output_option = click.option(
    "--output",
    default="-",
    show_default=True,
    help="Output path; '-' writes to standard output.",
)


@click.group()
@click.option(
    "--seed",
    type=int,
    default=0,
    show_default=True,
    help="Recorded with every run; current operations are fully deterministic.",
)
@click.pass_context
def cli(ctx, seed):
    """Conformal fractional Laplacians on model geometries."""
    ctx.obj = {"seed": seed}


@cli.command()
@click.argument("geometry", type=click.Choice(["sphere", "cylinder"]))
@click.option("--n", type=int, required=True, help="Boundary dimension.")
@click.option("--s", type=float, required=True, help="Fractional order.")
@click.option(
    "--m",
    "modes",
    type=int,
    multiple=True,
    help="Mode numbers; sphere default 0..10, cylinder takes exactly one (default 0).",
)
@click.option(
    "--xi",
    "frequencies",
    type=float,
    multiple=True,
    help="Axial frequencies for the cylinder table (default 0 1 2 4).",
)
@_format_option
@_output_option
@click.pass_context
def symbol(ctx, geometry, n, s, modes, frequencies, fmt, output):
    """Tabulate a scattering symbol over modes or frequencies."""
    p = FracParams(n, s)
    if geometry == "sphere":
        if frequencies:
            raise ParameterError("--xi applies to the cylinder symbol only")
        chosen = list(modes) if modes else list(range(11))
        results = _sweep(
            lambda m: {"m": m, "symbol": float(sphere_symbol(p, m))}, chosen
        )
        params = _run_params(ctx, "symbol", geometry=geometry, n=n, s=s, m=chosen)
        diagnostics = {}
    else:
        if len(modes) > 1:
            raise ParameterError("cylinder tables sweep xi; give at most one --m")
        m = modes[0] if modes else 0
        chosen = list(frequencies) if frequencies else [0.0, 1.0, 2.0, 4.0]
        results = _sweep(
            lambda x: {"xi": x, "symbol": float(cyl_symbol(p, m, x))}, chosen
        )
        params = _run_params(
            ctx, "symbol", geometry=geometry, n=n, s=s, m=m, xi=chosen
        )
        diagnostics = {}
    _emit(fmt, output, params, results, diagnostics)


@cli.command()
@click.option("--n", type=int, required=True, help="Boundary dimension.")
@click.option(
    "--s",
    "orders",
    type=float,
    multiple=True,
    required=True,
    help="Fractional orders; repeat for a sweep.",
)
@_format_option
@_output_option
@click.pass_context
def curvature(ctx, n, orders, fmt, output):
    """Curvature and trace constants: Q_s, c_(n,s), d_s, d*_s, V_s."""

    def one(s):
        p = FracParams(n, s)
        q_s = float(sphere_curvature(p))
        record = {"s": s, "Q_s": q_s}
        record["c_ns"] = float(cyl_curvature(p)) if n >= 2 else None
        if 0.0 < s < 1.0 and abs(n - 2.0 * s) > 1e-12:
            record["d_s"] = float(d_s_const(s))
            record["d_star_s"] = float(d_star_const(s))
            record["V_s"] = float(
                weighted_volume_coefficient(p, q_s, vol_sphere(n))
            )
        else:
            record["d_s"] = None
            record["d_star_s"] = None
            record["V_s"] = None
        return record

    results = _sweep(one, orders)
    params = _run_params(ctx, "curvature", n=n, s=list(orders))
    diagnostics = {
        "trace_constants_domain": "0 < s < 1 and s != n/2; null otherwise",
        "sphere_volume": float(vol_sphere(n)),
    }
    _emit(fmt, output, params, results, diagnostics)


@cli.command()
@click.argument("geometry", type=click.Choice(["sphere", "cylinder"]))
@click.option("--n", type=int, required=True, help="Boundary dimension.")
@click.option("--s", type=float, required=True, help="Fractional order.")
@click.option(
    "--cos-theta",
    "cosines",
    type=float,
    multiple=True,
    help="Sphere sample points cos(theta) in [-1, 1); default -0.5 0 0.5 0.9.",
)
@click.option(
    "--h",
    "separations",
    type=float,
    multiple=True,
    help="Cylinder axial separations > 0; default 0.25 0.5 1 2 4.",
)
@click.option(
    "--period",
    type=float,
    default=None,
    help="Also tabulate the periodized kernel K_L at this period (cylinder).",
)
@_format_option
@_output_option
@click.pass_context
def kernel(ctx, geometry, n, s, cosines, separations, period, fmt, output):
    """Sample a calibrated singular kernel, with its calibration record."""
    p = FracParams(n, s)
    if geometry == "sphere":
        if separations or period is not None:
            raise ParameterError("--h and --period apply to the cylinder kernel")
        spec = calibrate_sphere_kernel(p)
        chosen = list(cosines) if cosines else [-0.5, 0.0, 0.5, 0.9]
        results = [
            {"cos_theta": c, "kernel": float(sphere_kernel(spec, c))}
            for c in chosen
        ]
        params = _run_params(
            ctx, "kernel", geometry=geometry, n=n, s=s, cos_theta=chosen
        )
    else:
        if cosines:
            raise ParameterError("--cos-theta applies to the sphere kernel")
        spec = calibrate_kernel(p)
        chosen = list(separations) if separations else [0.25, 0.5, 1.0, 2.0, 4.0]
        results = []
        for h in chosen:
            record = {"h": h, "kernel": float(cyl_kernel(spec, h))}
            record["periodized"] = (
                float(periodized_kernel(spec, period, h))
                if period is not None
                else None
            )
            results.append(record)
        params = _run_params(
            ctx, "kernel", geometry=geometry, n=n, s=s, h=chosen, period=period
        )
    diagnostics = {
        "normalization": float(spec.normalization),
        "calibration": {k: _plain(v) for k, v in spec.calibration.items()},
    }
    _emit(fmt, output, params, results, diagnostics)


def _plain(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _read_samples(path):
    rows = []
    with open(path, newline="") as handle:
        for line_no, row in enumerate(csv.reader(handle), start=1):
            if not row:
                continue
            if len(row) != 2:
                raise ParameterError(
                    f"{path}:{line_no}: expected two columns, got {len(row)}"
                )
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if line_no == 1:
                    continue
                raise ParameterError(
                    f"{path}:{line_no}: non-numeric sample"
                ) from None
    if not rows:
        raise ParameterError(f"{path}: no samples found")
    data = np.asarray(rows, dtype=float)
    return data[:, 0], data[:, 1]


def _line_grid(x, values):
    size = x.size
    if size < 8 or size & (size - 1) != 0:
        raise ParameterError(
            f"need a power-of-two sample count >= 8, got {size}"
        )
    half_width = -x[0]
    if not half_width > 0.0:
        raise ParameterError("abscissae must start at -T with T > 0")
    step = 2.0 * half_width / size
    expected = -half_width + step * np.arange(size)
    if not np.allclose(x, expected, rtol=0.0, atol=1e-9 * max(1.0, half_width)):
        raise ParameterError(
            "abscissae must form the uniform grid -T + j (2T/size) "
            "with the right endpoint excluded; inputs are never resampled"
        )
    return LineGridFunction(half_width, values)


@cli.command("apply")
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--s", type=float, required=True, help="Fractional order.")
@click.option(
    "--route",
    type=click.Choice(["spectral", "integral"]),
    default="spectral",
    show_default=True,
    help="Fourier multiplier route or calibrated difference quadrature.",
)
@click.option(
    "--edge-tol",
    type=float,
    default=1e-7,
    show_default=True,
    help="Relative boundary-band bound enforced by the spectral route.",
)
@_format_option
@_output_option
@click.pass_context
def apply_command(ctx, input_path, s, route, edge_tol, fmt, output):
    """Apply the line operator to samples from a two-column CSV file."""
    x, values = _read_samples(input_path)
    f = _line_grid(x, values)
    p = FracParams(1, s)
    if route == "spectral":
        out = frac_lap_spectral(p, f, edge_tol=edge_tol)
        diagnostics = {"route": route, "edge_tol": edge_tol}
    else:
        constant = cached_integral_constant(s)
        out = frac_lap_integral(p, f, constant)
        diagnostics = {
            "route": route,
            "integral_constant": constant,
            "calibration_size": 8192,
        }
    diagnostics["half_width"] = float(f.half_width)
    diagnostics["size"] = int(f.values.size)
    results = [
        {"x": float(a), "value": float(v)} for a, v in zip(f.x, out.values)
    ]
    params = _run_params(ctx, "apply", s=s, input=input_path, route=route)
    _emit(fmt, output, params, results, diagnostics)


@cli.command("extension-check")
@click.option(
    "--s",
    "orders",
    type=float,
    multiple=True,
    default=(0.2, 0.5, 0.8),
    show_default=True,
)
@click.option(
    "--xi",
    "frequencies",
    type=float,
    multiple=True,
    default=(0.5, 1.0, 2.0, 4.0),
    show_default=True,
)
@click.option("--mesh-size", type=int, default=600, show_default=True)
@_format_option
@_output_option
@click.pass_context
def extension_check(ctx, orders, frequencies, mesh_size, fmt, output):
    """Dirichlet-to-Neumann error table for the weighted extension."""
    for xi in frequencies:
        if not xi > 0.0:
            raise ParameterError("frequencies must be positive for the error table")
    pairs = [(s, xi) for s in orders for xi in frequencies]

    def one(pair):
        s, xi = pair
        sol = solve_extension_mode(FracParams(3, s), xi, mesh_size=mesh_size)
        reference = xi ** (2.0 * s)
        return {
            "s": s,
            "xi": xi,
            "dtn": float(sol.dtn),
            "reference": reference,
            "rel_error": abs(sol.dtn - reference) / reference,
        }

    results = _sweep(one, pairs)
    identity = max(
        abs(d_star_const(s) + d_s_const(s) / (2.0 * s)) for s in orders
    )
    params = _run_params(
        ctx,
        "extension-check",
        s=list(orders),
        xi=list(frequencies),
        mesh_size=mesh_size,
    )
    diagnostics = {
        "mesh_size": mesh_size,
        "d_star_identity_max_residual": identity,
        "target_rel_error": 1e-3,
    }
    _emit(fmt, output, params, results, diagnostics)


@cli.command("covariance-check")
@click.option(
    "--s",
    "orders",
    type=float,
    multiple=True,
    default=(0.3, 0.5, 0.7),
    show_default=True,
)
@click.option(
    "--degree",
    type=int,
    default=4,
    show_default=True,
    help="Check every spectrum degree 0..degree.",
)
@click.option("--size", type=int, default=1 << 16, show_default=True)
@click.option("--half-width", type=float, default=1000.0, show_default=True)
@_format_option
@_output_option
@click.pass_context
def covariance_check(ctx, orders, degree, size, half_width, fmt, output):
    """Stereographic bridge residuals between circle and line operators."""
    if degree < 0:
        raise ParameterError("degree must be nonnegative")
    combos = [(s, m) for s in orders for m in range(degree + 1)]

    def one(combo):
        s, m = combo
        coeffs = np.zeros(m + 1)
        coeffs[m] = 1.0
        report = covariance_bridge(
            FracParams(1, s),
            ModeSpectrum(1, coeffs),
            half_width=half_width,
            size=size,
        )
        return {
            "s": s,
            "degree": m,
            "mismatch_max": report["mismatch_max"],
            "mismatch_l2": report["mismatch_l2"],
        }

    results = _sweep(one, combos)
    params = _run_params(
        ctx,
        "covariance-check",
        s=list(orders),
        degree=degree,
        size=size,
        half_width=half_width,
    )
    diagnostics = {"size": size, "half_width": half_width, "target": 1e-3}
    _emit(fmt, output, params, results, diagnostics)


@cli.command()
@click.option(
    "--n",
    "dims",
    type=int,
    multiple=True,
    default=(3,),
    show_default=True,
)
@click.option(
    "--s",
    "orders",
    type=float,
    multiple=True,
    required=True,
)
@_format_option
@_output_option
@click.pass_context
def bifurcation(ctx, dims, orders, fmt, output):
    """Bifurcation period of the constant branch over a parameter grid."""
    combos = [(n, s) for n in dims for s in orders]

    def one(combo):
        n, s = combo
        return {"n": n, "s": s, "L0": float(bifurcation_period(FracParams(n, s)))}

    results = _sweep(one, combos)
    params = _run_params(ctx, "bifurcation", n=list(dims), s=list(orders))
    diagnostics = {"root_solver": "bisection", "xtol": 1e-12}
    _emit(fmt, output, params, results, diagnostics)


@cli.command()
@click.option("--n", type=int, default=3, show_default=True)
@click.option("--s", type=float, required=True)
@click.option(
    "--period",
    "periods",
    type=float,
    multiple=True,
    required=True,
    help="Periods to solve; several walk the branch with warm starts.",
)
@click.option("--size", type=int, default=512, show_default=True)
@click.option(
    "--stride",
    type=int,
    default=8,
    show_default=True,
    help="Emit every stride-th grid sample.",
)
@click.option("--tol", type=float, default=1e-11, show_default=True)
@_format_option
@_output_option
@click.pass_context
def delaunay(ctx, n, s, periods, size, stride, tol, fmt, output):
    """Solve the periodic curvature equation along a list of periods."""
    if stride < 1:
        raise ParameterError("stride must be at least 1")
    p = FracParams(n, s)
    solutions = continue_branch(p, list(periods), size=size, tol=tol)
    results = []
    summaries = []
    for sol in solutions:
        grid = sol.grid()
        summaries.append(
            {
                "period": sol.period,
                "residual_norm": sol.residual_norm,
                "energy": sol.energy,
                "tower_defect": bubble_tower_defect(sol),
                "nonconstant": sol.nonconstant,
                "peak": float(sol.values.max()),
            }
        )
        for j in range(0, size, stride):
            results.append(
                {
                    "period": sol.period,
                    "t": float(grid.t[j]),
                    "v": float(sol.values[j]),
                }
            )
    params = _run_params(
        ctx,
        "delaunay",
        n=n,
        s=s,
        period=list(periods),
        size=size,
        stride=stride,
        tol=tol,
    )
    diagnostics = {"solutions": summaries, "size": size, "tol": tol}
    _emit(fmt, output, params, results, diagnostics)


def _selftest_records():
    checks = []

    def add(name, metric, bound):
        checks.append(
            {
                "check": name,
                "metric": float(metric),
                "bound": float(bound),
                "status": "pass" if metric < bound else "fail",
            }
        )

    p57 = FracParams(5, 0.75)
    add(
        "sphere_zero_mode_matches_curvature",
        abs(sphere_symbol(p57, 0) - sphere_curvature(p57))
        / sphere_curvature(p57),
        1e-12,
    )
    p62 = FracParams(6, 2.0)
    add(
        "sphere_symbol_matches_gjms_product",
        abs(sphere_symbol(p62, 7) - gjms_symbol(6, 2, 7)) / gjms_symbol(6, 2, 7),
        1e-12,
    )
    circle = calibrate_sphere_kernel(FracParams(1, 0.3))
    add(
        "sphere_kernel_calibration_residual",
        circle.calibration["residual"],
        1e-8,
    )

    p35 = FracParams(3, 0.5)
    cyl_spec = calibrate_kernel(p35)
    duality = abs(
        kernel_multiplier(cyl_spec, 3.0) - cyl_symbol(p35, 0, 3.0)
    ) / cyl_symbol(p35, 0, 3.0)
    add("cylinder_kernel_duality", duality, 1e-6)
    p37 = FracParams(3, 0.7)
    add(
        "cylinder_principal_symbol",
        abs(cyl_symbol(p37, 0, 100.0) / 100.0**1.4 - 1.0),
        0.05,
    )

    mode = solve_extension_mode(FracParams(3, 0.5), 2.0)
    add("extension_dtn_rel_error", abs(mode.dtn - 2.0) / 2.0, 1e-3)
    add(
        "trace_constant_identity",
        abs(d_star_const(0.37) + d_s_const(0.37) / 0.74),
        1e-13,
    )

    size = 4096
    half_width = 64.0
    x = -half_width + (2.0 * half_width / size) * np.arange(size)
    gauss = LineGridFunction(half_width, np.exp(-0.5 * x * x))
    p16 = FracParams(1, 0.7)
    spectral = frac_lap_spectral(p16, gauss).values
    integral = frac_lap_integral(p16, gauss, cached_integral_constant(0.7)).values
    core = np.abs(x) <= 8.0
    add(
        "line_route_agreement",
        np.max(np.abs(spectral[core] - integral[core]))
        / np.max(np.abs(spectral)),
        1e-4,
    )
    p13 = FracParams(1, 0.3)
    report = commutator_check(p13, gauss, max_targets=65)
    add("commutator_residual", report["residual"], 1e-4)

    bridge = covariance_bridge(
        FracParams(1, 0.5),
        ModeSpectrum(1, np.array([1.0, 0.5, 0.25])),
        half_width=500.0,
        size=1 << 15,
    )
    add("covariance_bridge_mismatch", bridge["mismatch_max"], 1e-3)

    threshold = bifurcation_period(p35)
    add(
        "bifurcation_period_reference",
        abs(threshold - PERIOD_THRESHOLD_REFERENCE),
        1e-8,
    )
    bump = solve_delaunay(p35, 1.2 * threshold)
    add("delaunay_residual", bump.residual_norm, 1e-10)
    constant = PeriodicGridFunction(1.2 * threshold, np.ones(bump.values.size))
    add("delaunay_energy_drop", bump.energy - functional_FL(p35, constant), 0.0)
    defects = [
        bubble_tower_defect(solve_delaunay(p35, mult * threshold))
        for mult in (2.0, 3.0)
    ]
    add("tower_defect_contraction", defects[1] / defects[0], 1.0)
    return checks


@cli.command()
@_format_option
@_output_option
@click.pass_context
def selftest(ctx, fmt, output):
    """Run the deterministic invariant suite and report pass/fail lines."""
    results = _selftest_records()
    failed = [r["check"] for r in results if r["status"] != "pass"]
    params = _run_params(ctx, "selftest")
    diagnostics = {
        "checks": len(results),
        "failures": failed,
        "all_passed": not failed,
    }
    _emit(fmt, output, params, results, diagnostics)
    if failed:
        raise ConflapError(f"selftest failures: {', '.join(failed)}")


def main(argv=None):
    """Entry point mapping library errors onto stable exit codes."""
    try:
        result = cli.main(args=argv, standalone_mode=False, prog_name="conflap")
        return int(result) if isinstance(result, int) else 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 130
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except _VALIDATION_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except ConflapError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
