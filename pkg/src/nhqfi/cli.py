"""Command-line front end.

Subcommands: ``sweep``, ``validate``, ``channel-qfi``, ``regime`` and
``presets``.  Exit status is 0 on success, 1 when a validation fails and 2
for a bad sweep config or bad arguments.
"""
import argparse
import json
import math
import sys

import numpy as np

from . import __version__, presets, pt
from .errors import EstimationError, SpecError
from .sweep import render, run_sweep, spec_from_dict
from .validation import validate_suite

EXIT_OK, EXIT_FAIL, EXIT_SPEC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_SPEC, f"{self.prog}: error: {message}\n")


def _pt_flags(p, required=False):
    p.add_argument("--r", type=float, required=required)
    p.add_argument("--s", type=float, required=required)
    p.add_argument("--omega", type=float, default=None if not required else math.pi / 2,
                   help="radians (default pi/2)")


def _build_parser():
    root = _Parser(prog="nhqfi", description="Quantum Fisher information under non-Hermitian evolution.")
    root.add_argument("--version", action="version", version=f"nhqfi {__version__}")
    sub = root.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="evaluate a quantity over a grid")
    sw.add_argument("--config", help="JSON sweep config file")
    sw.add_argument("--preset", help="named recipe (see 'nhqfi presets')")
    sw.add_argument("--model", choices=("pt", "bosonic", "custom-matrix"))
    sw.add_argument("--quantity")
    _pt_flags(sw)
    sw.add_argument("--m", type=float)
    sw.add_argument("--phi", type=float)
    sw.add_argument("--basis", choices=("eigen", "eigen-unbroken", "eigen-broken", "explicit"))
    sw.add_argument("--g", type=float)
    sw.add_argument("--gamma-a", type=float)
    sw.add_argument("--gamma-b", type=float)
    sw.add_argument("--omega0", type=float)
    sw.add_argument("--theta", type=float, help="fixed theta for parameter grids")
    sw.add_argument("--theta-min", type=float)
    sw.add_argument("--theta-max", type=float)
    sw.add_argument("--theta-steps", type=int)
    sw.add_argument("--param", help="sweep this parameter instead of theta")
    sw.add_argument("--param-min", type=float)
    sw.add_argument("--param-max", type=float)
    sw.add_argument("--param-steps", type=int)
    sw.add_argument("--out", help="output path (default stdout)")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")

    va = sub.add_parser("validate", help="run the cross-oracle battery")
    va.add_argument("--seed", type=int, default=None)

    ch = sub.add_parser("channel-qfi", help="closed-form and numerically optimised channel QFI")
    _pt_flags(ch, required=True)
    ch.add_argument("--grid", type=int, default=64)
    ch.add_argument("--tol", type=float, default=1e-4)

    rg = sub.add_parser("regime", help="classify parameters and dump the eigensystem")
    _pt_flags(rg, required=True)
    rg.add_argument("--ep-tol", type=float, default=pt.EP_TOL)

    sub.add_parser("presets", help="list the named sweep recipes")
    return root


def _merge(base, over):
    out = dict(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _flag_overrides(a):
    over = {}
    if a.model is not None:
        over["model"] = a.model
    if a.quantity is not None:
        over["quantity"] = a.quantity
    params = {k: getattr(a, k) for k in ("r", "s", "omega", "g", "gamma_a", "gamma_b", "omega0")
              if getattr(a, k) is not None}
    if params:
        over["params"] = params
    st = {k: getattr(a, k) for k in ("m", "phi", "basis") if getattr(a, k) is not None}
    if st:
        over["initial_state"] = st
    if a.theta is not None:
        over["theta"] = a.theta
    grid = {}
    if a.param is not None:
        grid["name"] = a.param
        for key, val in (("min", a.param_min), ("max", a.param_max), ("steps", a.param_steps)):
            if val is not None:
                grid[key] = val
    else:
        for key, val in (("min", a.theta_min), ("max", a.theta_max), ("steps", a.theta_steps)):
            if val is not None:
                grid[key] = val
        if grid:
            grid["name"] = "theta"
    if grid:
        over["grid"] = grid
    return over


def _cmd_sweep(a, out):
    doc = {}
    if a.preset:
        try:
            doc = presets.get(a.preset)
        except KeyError as exc:
            raise SpecError(str(exc.args[0])) from None
    if a.config:
        try:
            with open(a.config, encoding="utf-8") as fh:
                doc = _merge(doc, json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"config: {exc}") from None
    doc = _merge(doc, _flag_overrides(a))
    text = render(run_sweep(spec_from_dict(doc)), a.format)
    if a.out:
        with open(a.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def _cmd_validate(a, out):
    report = validate_suite() if a.seed is None else validate_suite(a.seed)
    for line in report.lines():
        print(line, file=out)
    return EXIT_OK if report.passed else EXIT_FAIL


def _params(a):
    return pt.PtParams(a.r, a.s, math.pi / 2 if a.omega is None else a.omega)


def _cmd_channel(a, out):
    P = _params(a)
    closed = pt.channel_qfi(P)
    reg = pt.classify(P)
    doc = {"regime": reg.tag.value, "closed_form": closed}
    ok = True
    if reg.is_ep:
        doc["numeric"] = None
    else:
        res = pt.channel_qfi_numeric(P, grid=a.grid)
        doc.update(numeric=res.value, m=res.m, phi=res.phi, theta=res.theta,
                   difference=abs(res.value - closed))
        ok = abs(res.value - closed) <= a.tol
    print(json.dumps(doc, indent=2), file=out)
    return EXIT_OK if ok else EXIT_FAIL


def _pair(z):
    return [float(np.real(z)), float(np.imag(z))]


def _cmd_regime(a, out):
    P = _params(a)
    reg = pt.classify(P, a.ep_tol)
    doc = {"regime": reg.tag.value, "mu": reg.mu, "nu": reg.nu,
           "hamiltonian": [[_pair(z) for z in row] for row in pt.build(P)]}
    if reg.is_ep:
        doc["eigenvalues"] = [_pair(reg.mu)]
        doc["eigenvectors"] = [[_pair(z) for z in pt.ep_eigenvector(P)]]
    else:
        vals, vecs = pt.eigensystem(P, a.ep_tol)
        doc["eigenvalues"] = [_pair(v) for v in vals]
        doc["eigenvectors"] = [[_pair(z) for z in v] for v in vecs]
        doc["overlap"] = _pair(np.vdot(vecs[0], vecs[1]))
    print(json.dumps(doc, indent=2), file=out)
    return EXIT_OK


def _cmd_presets(a, out):
    for name in sorted(presets.PRESETS):
        d = presets.PRESETS[name]
        print(f"{name:<18s} {d['model']:<8s} {d['quantity']}", file=out)
    return EXIT_OK


COMMANDS = {"sweep": _cmd_sweep, "validate": _cmd_validate, "channel-qfi": _cmd_channel,
            "regime": _cmd_regime, "presets": _cmd_presets}


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = _build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except SpecError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except EstimationError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
