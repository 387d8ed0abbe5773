"""Command-line front end.

Subcommands::

    pasdfs sweep     witness values over a sweep of |alpha|
    pasdfs state     Fock amplitudes of one state
    pasdfs phase     phase distribution samples (theta, P)
    pasdfs qfunc     Husimi Q samples (Re beta, Im beta, Q)
    pasdfs selfcheck closed form vs dense-matrix oracle

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 selfcheck mismatch.

``sweep`` also reads an INI-style config file (``--config``) whose
``[sweep]`` section takes the long flag names as keys, e.g.::

    [sweep]
    k = 2
    q = 0,1
    n = 0
    alpha-start = 0
    alpha-stop = 2
    alpha-steps = 201
    theta = 0
    criterion = antibunching:1,2,3
                hong_mandel:2
    eps = 1e-12
    format = csv
    jobs = 4
    oracle-check = false

Command-line flags override values from the file.
"""

from __future__ import annotations

import argparse
import cmath
import configparser
import math
import sys

import numpy as np

from . import sweep as sw
from .engineering import DEFAULT_EPS, StateSpec, pasdfs_amplitudes
from .errors import AnnihilationError, DomainError, PasdfsError, TruncationError
from .fock import pasdfs_oracle
from .husimi import find_zeros, q_grid
from .moments import Moments, OracleMoments
from .phase import DEFAULT_GRID, phase_distribution, phase_fluctuation_U
from .witnesses import evaluate

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_MISMATCH = 0, 1, 2, 3

SELFCHECK_ALPHAS = (0j, cmath.rect(0.5, math.pi / 4), 1 + 0j, 2 + 0j)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return tuple(int(v) for v in str(text).replace(" ", "").split(",") if v != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _parse_criterion(text, default_orders):
    name, _, orders = text.strip().partition(":")
    if orders:
        return name, _int_list(orders)
    if default_orders is not None:
        return name, default_orders
    return name, (sw.DEFAULT_ORDERS.get(name, 0),)


def _state_args(p):
    p.add_argument("--k", type=int, default=0, help="photons added")
    p.add_argument("--q", type=int, default=0, help="photons subtracted")
    p.add_argument("--n", type=int, default=0, help="Fock parameter")
    p.add_argument("--alpha", type=float, default=0.0, help="|alpha|")
    p.add_argument("--theta", type=float, default=0.0, help="phase of alpha (radians)")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS, help="truncation tail bound")
    p.add_argument("--out", default="-", help="output file (default stdout)")


def build_parser():
    parser = _Parser(prog="pasdfs", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep", help="witness values over |alpha|")
    p.add_argument("--config", help="INI file with a [sweep] section")
    p.add_argument("--k", type=_int_list)
    p.add_argument("--q", type=_int_list)
    p.add_argument("--n", type=_int_list)
    p.add_argument("--alpha-start", type=float)
    p.add_argument("--alpha-stop", type=float)
    p.add_argument("--alpha-steps", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--criterion", action="append",
                   help="name or name:o1,o2 (repeatable); names: " + ", ".join(sw.SWEEP_CRITERIA))
    p.add_argument("--order", type=_int_list, help="default orders for criteria given without any")
    p.add_argument("--eps", type=float)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", default="-")
    p.add_argument("--jobs", type=int)
    p.add_argument("--oracle-check", action="store_true", default=None)

    p = sub.add_parser("state", help="Fock amplitudes of one state")
    _state_args(p)

    p = sub.add_parser("phase", help="phase distribution samples")
    _state_args(p)
    p.add_argument("--grid-points", type=int, default=DEFAULT_GRID)

    p = sub.add_parser("qfunc", help="Husimi Q function samples")
    _state_args(p)
    p.add_argument("--window", default="auto", help="'auto' or re_min,re_max,im_min,im_max")
    p.add_argument("--nx", type=int, default=128)
    p.add_argument("--ny", type=int, default=128)

    p = sub.add_parser("selfcheck", help="compare closed forms against the dense oracle")
    p.add_argument("--max", type=int, default=2, help="largest k, q, n in the grid")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", default="-")
    return parser


_FILE_KEYS = {"k", "q", "n", "alpha-start", "alpha-stop", "alpha-steps", "theta",
              "criterion", "order", "eps", "format", "jobs", "oracle-check"}


def _read_config(path):
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise UsageError(f"config: cannot read {path}")
    if not cp.has_section("sweep"):
        raise UsageError("config: missing [sweep] section")
    out = {}
    for key, value in cp.items("sweep"):
        norm = key.replace("_", "-")
        if norm not in _FILE_KEYS:
            raise UsageError(f"config: unknown key {key!r}")
        out[norm] = value
    return out


def sweep_config(args) -> sw.SweepConfig:
    """Merge config file and flags (flags win) into a validated config."""
    file = _read_config(args.config) if args.config else {}

    def pick(flag, key, conv, default):
        if flag is not None:
            return flag
        if key in file:
            try:
                return conv(file[key])
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"{key}: {exc}")
        return default

    def as_bool(text):
        low = text.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {text!r}")

    default_orders = pick(args.order, "order", _int_list, None)
    crit_text = args.criterion
    if crit_text is None and "criterion" in file:
        crit_text = [c for c in file["criterion"].replace("\n", " ").split() if c]
    if not crit_text:
        crit_text = ["antibunching"]
    criteria = tuple(_parse_criterion(c, default_orders) for c in crit_text)

    try:
        return sw.SweepConfig(
            ks=pick(args.k, "k", _int_list, (0,)),
            qs=pick(args.q, "q", _int_list, (0,)),
            ns=pick(args.n, "n", _int_list, (0,)),
            alpha_start=pick(args.alpha_start, "alpha-start", float, 0.0),
            alpha_stop=pick(args.alpha_stop, "alpha-stop", float, 2.0),
            alpha_steps=pick(args.alpha_steps, "alpha-steps", int, 201),
            theta=pick(args.theta, "theta", float, 0.0),
            criteria=criteria,
            fmt=pick(args.format, "format", str, "csv"),
            eps=pick(args.eps, "eps", float, DEFAULT_EPS),
            oracle_check=pick(args.oracle_check, "oracle-check", as_bool, False),
            jobs=pick(args.jobs, "jobs", int, 1),
        )
    except sw.ConfigError as exc:
        raise UsageError(str(exc))


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _spec(args):
    try:
        return StateSpec(args.k, args.q, args.n, cmath.rect(args.alpha, args.theta) if args.alpha else 0j)
    except PasdfsError as exc:
        raise UsageError(str(exc))


def _build_state(args):
    spec = _spec(args)
    try:
        return spec, pasdfs_amplitudes(spec, args.eps)
    except DomainError as exc:
        raise UsageError(str(exc))


def cmd_sweep(args):
    config = sweep_config(args)
    rows = sw.run_sweep(config)
    _write(args.out, sw.format_rows(rows, config.fmt))
    if config.oracle_check and sw.oracle_failures(rows):
        print(f"oracle mismatch in {len(sw.oracle_failures(rows))} rows", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def _header(spec, psi):
    return [
        "# pasdfs-state v1",
        f"# spec k={spec.k} q={spec.q} n={spec.n} alpha_abs={sw.fmt_float(abs(spec.alpha))} "
        f"alpha_phase={sw.fmt_float(cmath.phase(spec.alpha))}",
        f"# normalization_residual={sw.fmt_float(abs(psi.norm ** 2 - 1))}",
        f"# truncation_size={len(psi)} max_photon={psi.max_photon} "
        f"tail={sw.fmt_float(psi.truncation_eps)}",
    ]


def cmd_state(args):
    spec, psi = _build_state(args)
    lines = _header(spec, psi) + ["photon,re,im,probability"]
    for w, c in zip(psi.photon_numbers, psi.amps):
        lines.append(f"{w},{sw.fmt_float(c.real)},{sw.fmt_float(c.imag)},"
                     f"{sw.fmt_float(abs(c) ** 2)}")
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_phase(args):
    spec, psi = _build_state(args)
    if args.grid_points < 256:
        raise UsageError("grid-points: must be >= 256")
    dist = phase_distribution(psi, args.grid_points)
    fl = phase_fluctuation_U(psi)
    lines = _header(spec, psi)[:2] + [
        f"# integral={sw.fmt_float(dist.integral())} U={sw.fmt_float(fl.U)}",
        "theta,P",
    ]
    lines += [f"{sw.fmt_float(t)},{sw.fmt_float(v)}" for t, v in zip(dist.thetas, dist.values)]
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_qfunc(args):
    spec, psi = _build_state(args)
    window = args.window
    if window != "auto":
        try:
            window = tuple(float(v) for v in window.split(","))
        except ValueError:
            raise UsageError(f"window: cannot parse {args.window!r}")
        if len(window) != 4:
            raise UsageError("window: need re_min,re_max,im_min,im_max")
    try:
        grid = q_grid(psi, window, args.nx, args.ny)
    except ValueError as exc:
        raise UsageError(str(exc))
    zeros = find_zeros(psi, grid)
    lines = _header(spec, psi)[:2] + [
        f"# mass={sw.fmt_float(grid.mass())} peak={sw.fmt_float(grid.peak)} zeros={len(zeros)}",
    ]
    lines += [f"# zero {sw.fmt_float(z.real)},{sw.fmt_float(z.imag)}" for z in zeros]
    lines.append("re,im,Q")
    for iy, y in enumerate(grid.im):
        for ix, x in enumerate(grid.re):
            lines.append(f"{sw.fmt_float(x)},{sw.fmt_float(y)},{sw.fmt_float(grid.values[iy, ix])}")
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _witness_args():
    for l in range(2, 7):
        yield "antibunching", l
        yield "hosps", l
    for l in (2, 4, 6):
        yield "hong_mandel", l
    for z in range(6):
        yield "klyshko", z
    yield "agarwal_tara", 0
    yield "vogel", 0


def selfcheck(max_param=2, tol=1e-9, alphas=SELFCHECK_ALPHAS):
    """Closed-form vs oracle comparison over a parameter grid.

    Returns ``(lines, n_failures)``.
    """
    lines = []
    failures = 0
    for k in range(max_param + 1):
        for q in range(max_param + 1):
            for n in range(max_param + 1):
                for alpha in alphas:
                    spec = StateSpec(k, q, n, alpha)
                    try:
                        psi = pasdfs_amplitudes(spec)
                    except AnnihilationError:
                        lines.append(f"SKIP {spec} annihilated")
                        continue
                    opsi = pasdfs_oracle(k, q, n, alpha)
                    dim = max(psi.max_photon, opsi.max_photon) + 1
                    amp_err = float(np.max(np.abs(psi.to_dense(dim) - opsi.to_dense(dim))))
                    mom, omom = Moments(psi), OracleMoments(opsi)
                    mom_err = max(abs(mom(t, j) - omom(t, j)) / (1 + abs(mom(t, j)))
                                  for t in range(5) for j in range(5))
                    wit_err = 0.0
                    for crit, arg in _witness_args():
                        a = evaluate(psi, crit, arg).value
                        b = evaluate(opsi, crit, arg, omom).value
                        if math.isnan(a) and math.isnan(b):
                            continue
                        wit_err = max(wit_err, abs(a - b) / (1 + abs(a)))
                    ok = amp_err <= min(tol, 1e-10) and mom_err <= tol and wit_err <= tol
                    failures += not ok
                    lines.append(f"{'PASS' if ok else 'FAIL'} {spec} amp={amp_err:.2e} "
                                 f"moments={mom_err:.2e} witnesses={wit_err:.2e}")
    return lines, failures


def cmd_selfcheck(args):
    if args.max < 0 or args.max > 12:
        raise UsageError("max: must lie in [0, 12]")
    lines, failures = selfcheck(args.max, args.tol)
    lines.append(f"{'OK' if not failures else 'MISMATCH'}: {failures} failing specs")
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_MISMATCH if failures else EXIT_OK


COMMANDS = {"sweep": cmd_sweep, "state": cmd_state, "phase": cmd_phase,
            "qfunc": cmd_qfunc, "selfcheck": cmd_selfcheck}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"pasdfs {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AnnihilationError, TruncationError) as exc:
        print(f"pasdfs {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
