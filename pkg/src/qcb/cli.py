"""Command-line front end: ``qcb <verb> [options]``.

Results go to stdout as JSON (or to ``--out``).  Exit status is 0 on success,
2 on usage errors and 1 when a computation fails.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds, channels, ensembles, io, qinfo, verify
from .energy import OscillatorSpec, f_osc_hat, shifted_f_hat
from .errors import QcbError

GRID_TOL = 1e-12


def parse_grid(text: str, cast=float) -> tuple:
    """``start:stop:step`` (endpoints inclusive within 1e-12) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"grid {text!r} must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError(f"grid {text!r} needs step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + GRID_TOL)) + 1
        vals = [start + k * step for k in range(count)]
        vals = [round(v, 12) for v in vals]
        return tuple(cast(v) for v in vals)
    try:
        return tuple(cast(float(v)) if cast is float else cast(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse grid {text!r}") from None


def _int_grid(text: str) -> tuple:
    return parse_grid(text, int)


def _base(text: str):
    if text == "2":
        return 2
    if text == "e":
        return "e"
    raise argparse.ArgumentTypeError("log base must be 2 or e")


def _parts(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip()) if text else ()


def _emit(args, payload) -> None:
    text = io.dumps(payload)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def cmd_entropy(args) -> None:
    rho = io.state_from_json(io.load(args.state))
    _emit(args, {"entropy": qinfo.entropy(rho, args.log_base)})


def cmd_qcmi(args) -> None:
    rho = io.state_from_json(io.load(args.state))
    c = _parts(args.c) if args.c is not None else None
    val = qinfo.qcmi(rho, _parts(args.a), _parts(args.b), c, args.log_base)
    _emit(args, {"qcmi": val})


def cmd_holevo(args) -> None:
    mu = io.ensemble_from_json(io.load(args.ensemble))
    _emit(args, {"holevo": qinfo.holevo(mu, args.log_base)})


def cmd_metric(args) -> None:
    mu = io.ensemble_from_json(io.load(args.a))
    nu = io.ensemble_from_json(io.load(args.b))
    if args.kind == "d0":
        payload = {"kind": "d0", "value": ensembles.d0(mu, nu)}
    elif args.kind == "dk":
        payload = ensembles.d_k(mu, nu).to_dict()
    elif args.kind == "dstar":
        payload = ensembles.d_star(mu, nu, tol=args.tol).to_dict()
    else:
        payload = ensembles.d_star_commuting(mu, nu).to_dict()
    _emit(args, payload)


def _f_hat(args):
    """Entropy bound callable for the energy-constrained bounds, plus ``ell`` for the oscillator form."""
    if args.omegas:
        osc = OscillatorSpec(args.omegas)
        return (lambda e: f_osc_hat(osc, e, args.log_base)), osc.modes
    if args.energy_spec:
        spec = io.energy_from_json(io.load(args.energy_spec))
        if isinstance(spec, OscillatorSpec):
            return (lambda e: f_osc_hat(spec, e, args.log_base)), spec.modes
        return (lambda e: shifted_f_hat(spec, e, args.log_base)), None
    raise QcbError("energy-constrained bounds need --omegas or --energy-spec")


def cmd_bound(args) -> None:
    base = args.log_base
    name = args.name
    need = lambda *keys: [k for k in keys if getattr(args, k) is None]  # noqa: E731
    missing = {
        "audenaert": need("eps", "d"),
        "winter-ce": need("eps", "d"),
        "cmi-fannes": need("eps", "d"),
        "cmi-qqc": need("eps", "d", "m"),
        "holevo-d": need("eps", "d"),
        "holevo-mn": need("m"),
        "capacity": need("eps", "d", "which"),
        "n-copy": need("eps", "d", "n"),
        "winter-cmi": need("eps", "E"),
        "winter-holevo": need("eps", "E"),
        "cmi-prop1": need("rho", "sigma"),
        "lemma1": need("x"),
    }[name]
    if missing:
        raise QcbError(f"bound {name} needs --{', --'.join(m.replace('_', '-') for m in missing)}")
    report: dict
    if name == "audenaert":
        report = {"bound": bounds.audenaert_entropy_bound(args.eps, args.d, base)}
    elif name == "winter-ce":
        report = {"bound": bounds.winter_ce_bound(args.eps, args.d, args.qc, base)}
    elif name == "cmi-fannes":
        report = {"bound": bounds.cmi_fannes_bound(args.eps, args.d, args.equal_marginal, base)}
    elif name == "cmi-qqc":
        report = {"bound": bounds.cmi_qqc_bound(args.eps, args.d, args.m, one_sided=args.equal_marginal, base=base)}
    elif name == "holevo-d":
        report = {"bound": bounds.holevo_fannes_bound("d", eps_star=args.eps, d=args.d, equal_average=args.equal_average, base=base)}
    elif name == "holevo-mn":
        report = {"bound": bounds.holevo_fannes_bound(
            "mn", eps_star=args.eps, eps0=args.eps0, m=args.m, n=args.n,
            equal_average=args.equal_average, equal_probs=args.equal_probs, base=base)}
    elif name == "capacity":
        report = {"bound": bounds.capacity_bound(args.eps, args.d, args.which, base)}
    elif name == "n-copy":
        report = {"bound": bounds.n_copy_finite(args.eps, args.d, args.n, base)}
    elif name in ("winter-cmi", "winter-holevo"):
        f_hat, ell = _f_hat(args)
        fn = bounds.winter_cmi_bound if name == "winter-cmi" else bounds.winter_holevo_bound

        def at(t: float) -> float:
            return fn(bounds.WinterParams(args.eps, t, args.E, f_hat, ell=ell, base=base))

        if args.t is not None:
            report = {"bound": at(args.t), "t": args.t}
        else:
            t_opt, val = bounds.optimize_t(at, args.eps)
            report = {"bound": val, "t_opt": t_opt}
    elif name == "cmi-prop1":
        rho = io.state_from_json(io.load(args.rho))
        sigma = io.state_from_json(io.load(args.sigma))
        report = bounds.cmi_prop1_bound(rho, sigma, base=base).to_dict()
    else:
        t_opt, val = bounds.lemma1_min(args.x, args.b, args.c)
        report = {"min": val, "t_opt": t_opt, "ratio": (val - args.x) / args.x}
    report.setdefault("name", name)
    _emit(args, report)


def cmd_channel(args) -> None:
    phi = io.channel_from_json(io.load(args.channel))
    base = args.log_base
    if args.op == "apply":
        if not args.state:
            raise QcbError("channel apply needs --state")
        rho = io.state_from_json(io.load(args.state))
        out = channels.apply(phi, rho, on=args.on)
        _emit(args, io.state_to_json(out))
    elif args.op == "capacities":
        if phi.family is None:
            raise QcbError("closed-form capacities need a family channel")
        caps = channels.analytic_capacities(phi.family, base)
        _emit(args, caps)
    elif args.op in ("op-distance", "diamond"):
        if not args.other:
            raise QcbError(f"channel {args.op} needs --other")
        psi = io.channel_from_json(io.load(args.other))
        fn = channels.channel_op_distance if args.op == "op-distance" else channels.channel_diamond_distance
        _emit(args, fn(phi, psi, trials=args.trials, seed=args.seed).to_dict())
    elif args.op == "holevo":
        res = channels.one_shot_holevo(phi, restarts=args.restarts, seed=args.seed, base=base)
        _emit(args, {"holevo_capacity_lower": res.value, "restarts": res.restarts})
    elif args.op == "coherent":
        res = channels.one_shot_coherent_max(phi, restarts=args.restarts, seed=args.seed, base=base)
        _emit(args, {"coherent_information_lower": res.value, "restarts": res.restarts})
    elif args.op == "mutual":
        if args.state:
            rho = io.state_from_json(io.load(args.state))
            _emit(args, {"mutual_information": channels.mutual_information_of_channel(phi, rho, base)})
        else:
            res = channels.one_shot_mutual_max(phi, restarts=args.restarts, seed=args.seed, base=base)
            _emit(args, {"mutual_information_lower": res.value, "restarts": res.restarts})
    elif args.op == "complement":
        _emit(args, io.channel_to_json(channels.complementary(phi)))


def cmd_suite(args) -> None:
    if args.from_json:
        table = verify.SuiteTable.from_json(Path(args.from_json).read_text())
    else:
        if not args.name:
            raise QcbError("suite needs --name or --from-json")
        cfg = verify.SuiteConfig(
            args.name,
            dims=args.dims,
            eps=args.eps,
            energies=args.E,
            omegas=tuple(args.omegas) if args.omegas else (1.0,),
            p=args.p,
            n=args.n,
            x=args.x,
            seed=args.seed,
            base=args.log_base,
        )
        table = verify.run_suite(cfg)
    csv_text = table.to_csv()
    if args.out:
        out = Path(args.out)
        out.write_text(csv_text)
        out.with_suffix(".json").write_text(table.to_json() + "\n")
    else:
        sys.stdout.write(csv_text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcb", description="Quantum continuity-bound toolkit.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-base", type=_base, default=2, help="2 (bits, default) or e (nats)")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("entropy", parents=[common], help="von Neumann entropy of a state")
    p.add_argument("--state", required=True)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("qcmi", parents=[common], help="conditional mutual information I(A:B|C)")
    p.add_argument("--state", required=True)
    p.add_argument("--a", default="0", help="comma list of factors in A")
    p.add_argument("--b", default="1", help="comma list of factors in B")
    p.add_argument("--c", default=None, help="comma list of factors in C (default: factor 2 if present)")
    p.set_defaults(func=cmd_qcmi)

    p = sub.add_parser("holevo", parents=[common], help="Holevo quantity of an ensemble")
    p.add_argument("--ensemble", required=True)
    p.set_defaults(func=cmd_holevo)

    p = sub.add_parser("metric", parents=[common], help="distance between two ensembles")
    p.add_argument("--kind", choices=["d0", "dk", "dstar", "dstar-commuting"], required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("bound", parents=[common], help="evaluate a continuity bound")
    p.add_argument("--name", required=True, choices=[
        "audenaert", "winter-ce", "cmi-fannes", "cmi-qqc", "holevo-d", "holevo-mn", "capacity",
        "n-copy", "winter-cmi", "winter-holevo", "cmi-prop1", "lemma1"])
    p.add_argument("--eps", type=float)
    p.add_argument("--eps0", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--which", choices=list(bounds.CAPACITIES))
    p.add_argument("--qc", action="store_true")
    p.add_argument("--equal-marginal", action="store_true")
    p.add_argument("--equal-average", action="store_true")
    p.add_argument("--equal-probs", action="store_true")
    p.add_argument("--E", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--omegas", type=parse_grid)
    p.add_argument("--energy-spec")
    p.add_argument("--rho")
    p.add_argument("--sigma")
    p.add_argument("--x", type=float)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--c", type=float, default=0.0)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("channel", parents=[common], help="channel operations and capacities")
    p.add_argument("--op", required=True, choices=["apply", "capacities", "op-distance", "diamond", "holevo", "coherent", "mutual", "complement"])
    p.add_argument("--channel", required=True)
    p.add_argument("--other")
    p.add_argument("--state")
    p.add_argument("--on", type=int, default=0)
    p.add_argument("--trials", type=int, default=64)
    p.add_argument("--restarts", type=int, default=16)
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("suite", parents=[common], help="run a tightness suite (CSV output)")
    p.add_argument("--name", choices=list(verify.SUITES))
    p.add_argument("--dims", type=_int_grid)
    p.add_argument("--eps", type=parse_grid)
    p.add_argument("--E", type=parse_grid, help="energies as multiples of the ground energy")
    p.add_argument("--omegas", type=parse_grid)
    p.add_argument("--p", type=parse_grid)
    p.add_argument("--n", type=_int_grid)
    p.add_argument("--x", type=parse_grid)
    p.add_argument("--from-json", help="re-render a JSON suite mirror as CSV")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        args.func(args)
    except (QcbError, ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"qcb: error: {exc}", file=sys.stderr)
        return 1
    return 0


run = main

if __name__ == "__main__":
    sys.exit(main())
