"""Command-line entry point.

Every subcommand reads a ``key = value`` configuration file (``--config``);
``--set key=value`` and the explicit flags override it.  Exit codes: 0 on
success, 1 on a configuration error, 2 when a solver does not converge or
a check fails.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .errors import ConfigError, ConvergenceError
from .records import format_record, load_config, write_text

log = logging.getLogger("fracfucik")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2


def _setup(cfg):
    from .domain import build_mesh
    from .kernel.energy import assemble

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        mesh = build_mesh(cfg.domain(), cfg.resolution)
    for w in caught:
        log.warning("%s", w.message)
    return assemble(mesh)


def _out(cfg, name):
    return os.path.join(cfg.output, name)


def cmd_lambda1(cfg):
    from .eigen import lambda1

    E = _setup(cfg)
    try:
        res = lambda1(E)
    except ConvergenceError as exc:
        res, status = exc.result, EXIT_SOLVER
    else:
        status = EXIT_OK
    x = E.mesh.nodes
    items = [("lambda1", res.value), ("residual", res.residual),
             ("method", res.method), ("converged", res.converged),
             ("iterations", res.iterations)]
    if res.gap is not None:
        items.append(("gap", res.gap))
    arrays = {f"x{d}": x[:, d] for d in range(x.shape[1])}
    arrays["phi1"] = res.function
    write_text(_out(cfg, "lambda1.txt"),
               format_record(cfg.header("lambda1"), items, arrays))
    if cfg.plot and E.mesh.n == 1:
        write_text(_out(cfg, "lambda1.svg"),
                   _profile_svg(x[:, 0], res.function, cfg.header("lambda1")))
    print(f"lambda1 = {res.value:.12g}  residual = {res.residual:.3e}")
    return status


def cmd_curve(cfg):
    from .eigen import lambda1
    from .spectrum import check_properties, sweep, trivial_lines_check

    E = _setup(cfg)
    phi = lambda1(E)
    curve = sweep(cfg.s_grid, E, phi1=phi, m=cfg.path_samples, rel_tol=cfg.rel_tol,
                  grad_tol=cfg.grad_tol, max_iter=cfg.max_iter)
    head = cfg.header("curve")
    write_text(_out(cfg, "curve.csv"), curve.to_csv(head + [f"lambda1 {phi.value:.12e}"]))
    write_text(_out(cfg, "curve.svg"), curve.to_svg(head))
    lines = [f"# {h}" for h in head]
    lines.append(f"lambda1 = {phi.value:.12e}")
    conv = curve.converged()
    lines.append(f"converged = {len(conv)} of {len(curve.points)}")
    for pt in curve.points:
        if not pt.converged:
            lines.append(f"not converged: s = {pt.s:g} (reduced gradient {pt.grad_norm:.3e})")
    status = EXIT_OK if len(conv) == len(curve.points) else EXIT_SOLVER
    if len(conv) >= 3:
        rep = check_properties(curve)
        for name, ok in rep.checks.items():
            lines.append(f"{'PASS' if ok else 'FAIL'}  {name}"
                         + ("" if ok else f": {rep.offending[name][:5]}"))
        lines.extend(f"note: {n}" for n in rep.notes)
        if not rep.ok:
            status = EXIT_SOLVER
    else:
        lines.append("FAIL  fewer than 3 converged points; properties not checked")
        status = EXIT_SOLVER
    tl = trivial_lines_check(E, phi)
    lines.append(f"{'PASS' if tl.ok else 'FAIL'}  trivial lines (tol {tl.tol:g})")
    write_text(_out(cfg, "properties.txt"), "\n".join(lines) + "\n")
    print("\n".join(lines[len(head):]))
    return status


def cmd_bbm(cfg):
    from .limits import bbm_csv, bbm_table

    if cfg.n != 1 or (cfg.omega_min, cfg.omega_max) != (-1.0, 1.0):
        raise ConfigError("bbm runs the u = x study on (-1, 1) in 1D")
    rows = bbm_table(cfg.alpha_list, cfg.bbm_resolution, cfg.p)
    text = bbm_csv(rows, cfg.header("bbm"))
    write_text(_out(cfg, "bbm.csv"), text)
    print(text, end="")
    return EXIT_OK


def cmd_steklov(cfg):
    from .limits import eigen_limit_study, table_csv

    if cfg.n != 1 or cfg.p != 2.0:
        raise ConfigError("steklov needs n = 1 and p = 2")
    rows = eigen_limit_study(cfg.alpha_list, cfg.steklov_resolution,
                             cfg.truncation_radius)
    text = table_csv(rows, cfg.header("steklov"))
    write_text(_out(cfg, "steklov.csv"), text)
    print(text, end="")
    return EXIT_OK


def cmd_nonres(cfg):
    from .eigen import lambda1
    from .nonres import nonlinearity, solve_nonresonant, weighted_lambda1

    E = _setup(cfg)
    if E.p != 2.0:
        raise ConfigError("nonres needs p = 2")
    phi = lambda1(E)
    params = dict(cfg.nonlinearity_params)
    if cfg.nonlinearity in ("linear", "linear_arctan"):
        params.setdefault("k", phi.value)
    f = nonlinearity(cfg.nonlinearity, **params)
    res = solve_nonresonant(f, E, phi1=phi, m=cfg.path_samples)
    wl = weighted_lambda1(phi.value, E)
    items = [("nonlinearity", cfg.nonlinearity), ("params", params),
             ("lambda1", phi.value), ("weighted_lambda1_at_lambda1", wl),
             ("method", res.method), ("residual", res.residual), ("psi", res.psi),
             ("trivial", res.trivial), ("converged", res.converged),
             ("notes", "; ".join(res.notes) or "none")]
    arrays = {"x0": E.mesh.nodes[:, 0], "u": res.u} if E.mesh.n == 1 else {"u": res.u}
    write_text(_out(cfg, "nonres.txt"), format_record(cfg.header("nonres"), items, arrays))
    print(f"{res.method}: residual {res.residual:.3e}, trivial {res.trivial}, "
          f"weighted lambda1 {wl:.12g}")
    return EXIT_OK if res.converged else EXIT_SOLVER


def cmd_selftest(cfg):
    from . import selftest

    checks = selftest.run(cfg)
    text = selftest.report(checks, cfg.header("selftest"))
    write_text(_out(cfg, "selftest.txt"), text)
    print(text, end="")
    return EXIT_OK if all(c.ok for c in checks if c.gate) else EXIT_SOLVER


COMMANDS = {"lambda1": cmd_lambda1, "curve": cmd_curve, "bbm": cmd_bbm,
            "steklov": cmd_steklov, "nonres": cmd_nonres, "selftest": cmd_selftest}


def _profile_svg(x, u, header_lines, width=800, height=600):
    margin = 60
    lo, hi = float(x.min()), float(x.max())
    top, bot = float(u.max()), float(min(u.min(), 0.0))
    span = top - bot or 1.0

    def X(v):
        return margin + (width - 2 * margin) * (v - lo) / (hi - lo)

    def Y(v):
        return height - margin - (height - 2 * margin) * (v - bot) / span

    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    out += [f"<!-- {h} -->" for h in header_lines]
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
               f'height="{height}" viewBox="0 0 {width} {height}">')
    out.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>')
    out.append(f'<line x1="{X(lo):.2f}" y1="{Y(0):.2f}" x2="{X(hi):.2f}" '
               f'y2="{Y(0):.2f}" stroke="black"/>')
    pts = " ".join(f"{X(a):.2f},{Y(b):.2f}" for a, b in zip(x, u))
    out.append(f'<polyline id="phi1" points="{pts}" stroke="red" fill="none"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def build_parser():
    ap = argparse.ArgumentParser(prog="fracfucik", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"fracfucik {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", "-c", help="key = value configuration file")
        sp.add_argument("--output", "-o", help="output directory")
        sp.add_argument("--resolution", help="nodes per axis across the domain")
        sp.add_argument("--alpha")
        sp.add_argument("--p")
        sp.add_argument("--epsilon")
        sp.add_argument("--seed")
        sp.add_argument("--threads")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any configuration key")
        sp.add_argument("--verbose", "-v", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.captureWarnings(True)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {k: getattr(args, k) for k in
                 ("output", "resolution", "alpha", "p", "epsilon", "seed", "threads")}
    try:
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            k, v = item.split("=", 1)
            overrides[k.strip()] = v.strip()
        cfg = load_config(args.config, overrides)
        np.random.seed(cfg.seed)
        with threadpool_limits(limits=cfg.threads):
            return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
