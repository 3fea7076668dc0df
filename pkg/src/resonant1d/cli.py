"""Command-line front end.

Subcommands wrap the experiment recipes and raw operations:

    stationary  --k {1|2} --n-max INT
    evolve      --k --init FILE --t-end R --dt R --out FILE
    approx      --k --eps LIST --s R --out FILE
    symmetry    --k --seed INT
    bounds      --k --trials INT --seed INT
    functional  --k --route {theta|sum} --inputs FILES...
    decompose   --matrix FILE

Global flags (--n-modes, --m-times, --normalization, --config, --threads)
may also come from a JSON config file whose keys mirror the flags; flags
override the file.  Wherever a state file is expected, the special tokens
``phi0``..``phiK``, ``zero`` and ``random:SEED`` are also accepted.

Exit codes: 0 success, 1 validation error, 2 numerical failure (divergence
or a tolerance breach in a check subcommand).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .dynamics import (
    DivergenceError,
    full_profile_rhs,
    hamiltonian_value,
    integrate,
    resonant_rhs,
)
from .experiments import (
    random_state,
    render_text,
    run_approx_study,
    run_operator_bound_check,
    run_stationary_table,
    run_symmetry_suite,
)
from .hermite import HermiteState, basis_state, load_state
from .multilinear import (
    Isometry,
    ResonantConfig,
    decompose_isometry,
    e4_eval,
    e6_eval,
)

__all__ = ["main"]

_ROUTE_NAMES = {"theta": "theta_integral", "sum": "hermite_sum"}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; the contract reserves 2 for
    # numerical failures and 1 for validation problems
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _global_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--n-modes", type=int, default=None, help="band limit N")
    parent.add_argument("--m-times", type=int, default=None, help="time-quadrature count M")
    parent.add_argument(
        "--normalization",
        choices=["hamiltonian", "time-average"],
        default=None,
        help="operator normalization (default hamiltonian)",
    )
    parent.add_argument("--config", default=None, help="JSON file with keys mirroring the flags")
    parent.add_argument("--threads", type=int, default=None, help="cap for data-parallel kernels; 1 = deterministic")
    return parent


def _build_parser() -> argparse.ArgumentParser:
    parent = _global_flags()
    parser = _Parser(prog="resonant1d", description="quintic/cubic resonant Hamiltonian toolbox")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("stationary", parents=[parent], help="Hermite stationary-wave table")
    p.add_argument("--k", type=int, required=True, choices=[1, 2])
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--out", default=None, help="optional JSON report path")

    p = sub.add_parser("evolve", parents=[parent], help="integrate the resonant flow")
    p.add_argument("--k", type=int, required=True, choices=[1, 2])
    p.add_argument("--init", required=True, help="state file or token (phiK | zero | random:SEED)")
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--out", required=True, help="CSV path for the invariant series")
    p.add_argument("--sample-every", type=int, default=10)
    p.add_argument("--full-profile", action="store_true", help="integrate i v_t = N_t(v,..) instead")
    p.add_argument("--states-dir", default=None, help="optional directory for per-sample state JSON")

    p = sub.add_parser("approx", parents=[parent], help="resonant-vs-full scaling study")
    p.add_argument("--k", type=int, required=True, choices=[1, 2])
    p.add_argument("--eps", required=True, help="comma-separated epsilon list")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--out", required=True, help="JSON report path")
    p.add_argument("--dt", type=float, default=5e-3)
    p.add_argument("--horizon-factor", type=float, default=1.0)

    p = sub.add_parser("symmetry", parents=[parent], help="invariance suite for E_{2k+2}")
    p.add_argument("--k", type=int, required=True, choices=[1, 2])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--draws", type=int, default=50)
    p.add_argument("--out", default=None)

    p = sub.add_parser("bounds", parents=[parent], help="operator L^2 bound check")
    p.add_argument("--k", type=int, required=True, choices=[1, 2])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("functional", parents=[parent], help="evaluate E_6 or E_4")
    p.add_argument("--k", type=int, required=True, choices=[1, 2])
    p.add_argument("--route", choices=["theta", "sum"], default="theta")
    p.add_argument("--inputs", nargs="+", required=True, help="2k+2 state files/tokens")

    p = sub.add_parser("decompose", parents=[parent], help="pair decomposition of an isometry")
    p.add_argument("--matrix", required=True, help="JSON array of matrix rows")

    return parser


# ---------------------------------------------------------------------------
# config resolution and input parsing
# ---------------------------------------------------------------------------

_CONFIG_KEYS = ("n_modes", "m_times", "normalization", "threads", "k", "seed", "s", "dt")


def _resolve_config(args: argparse.Namespace) -> dict:
    resolved: dict = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            file_conf = json.load(fh)
        unknown = set(file_conf) - set(_CONFIG_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}; valid: {sorted(_CONFIG_KEYS)}")
        resolved.update(file_conf)
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
    resolved.setdefault("normalization", "hamiltonian")
    resolved["normalization"] = resolved["normalization"].replace("-", "_")
    return resolved


def _parse_state(token: str, n_modes: int) -> HermiteState:
    if token == "zero":
        return HermiteState(np.zeros(n_modes, dtype=complex))
    if token.startswith("phi"):
        try:
            n = int(token[3:])
        except ValueError:
            raise ValueError(f"bad state token {token!r}; expected phi<N>") from None
        return basis_state(n, max(n_modes, n + 1))
    if token.startswith("random:"):
        try:
            seed = int(token.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad state token {token!r}; expected random:SEED") from None
        return random_state(n_modes, seed)
    return load_state(token)


def _make_resonant_config(conf: dict, k: int, floor_modes: int = 1) -> ResonantConfig:
    return ResonantConfig(
        k=k,
        n_modes=max(conf.get("n_modes") or 8, floor_modes),
        m_times=conf.get("m_times"),
        normalization=conf.get("normalization", "hamiltonian"),
    )


def _limit_threads(conf: dict) -> None:
    threads = conf.get("threads")
    if threads is None:
        return
    try:
        from threadpoolctl import threadpool_limits  # type: ignore

        threadpool_limits(limits=threads)
    except ImportError:
        # kernels are plain sequential numpy calls either way; the flag only
        # caps BLAS pools when threadpoolctl is present
        pass


def _emit_report(report: dict, out_path: str | None) -> None:
    print(render_text(report))
    if out_path:
        with open(out_path, "w") as fh:
            json.dump(report, fh, indent=2)
        print(f"report written to {out_path}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_stationary(args, conf) -> int:
    report = run_stationary_table(args.k, args.n_max)
    _emit_report(report, args.out)
    return 0


def _cmd_evolve(args, conf) -> int:
    state0 = _parse_state(args.init, conf.get("n_modes") or 8)
    config = _make_resonant_config(conf, args.k, floor_modes=state0.n_modes)
    state0 = state0.padded(config.n_modes)
    rhs = full_profile_rhs(config) if args.full_profile else resonant_rhs(config)
    traj = integrate(
        rhs,
        state0,
        args.t_end,
        args.dt,
        sample_every=args.sample_every,
        hamiltonian=lambda st: hamiltonian_value(config, st),
    )
    traj.to_csv(args.out)
    if args.states_dir:
        traj.save_states(args.states_dir)
    print(f"{len(traj.times)} samples written to {args.out}")
    print(f"mass drift {traj.drift('mass'):.3e}, hamiltonian drift {traj.drift('hamiltonian'):.3e}")
    return 0


def _cmd_approx(args, conf) -> int:
    epsilons = [float(tok) for tok in args.eps.split(",") if tok.strip()]
    report = run_approx_study(
        args.k,
        epsilons,
        s=conf.get("s", args.s),
        horizon_factor=args.horizon_factor,
        n_modes=conf.get("n_modes") or 8,
        dt=conf.get("dt", args.dt),
    )
    report.pop("curves", None)
    _emit_report(report, args.out)
    return 0


def _cmd_symmetry(args, conf) -> int:
    report = run_symmetry_suite(args.k, seed=args.seed, n_draws=args.draws)
    _emit_report(report, args.out)
    return 0 if report["all_passed"] else 2


def _cmd_bounds(args, conf) -> int:
    report = run_operator_bound_check(
        args.k, trials=args.trials, seed=args.seed, n_modes=conf.get("n_modes") or 8
    )
    _emit_report(report, args.out)
    return 0 if report["passed"] else 2


def _cmd_functional(args, conf) -> int:
    arity = 2 * args.k + 2
    if len(args.inputs) != arity:
        raise ValueError(f"k={args.k} functional takes {arity} inputs, got {len(args.inputs)}")
    n_modes = conf.get("n_modes") or 8
    slots = [_parse_state(tok, n_modes) for tok in args.inputs]
    evaluate = e6_eval if args.k == 2 else e4_eval
    value = evaluate(slots, route=_ROUTE_NAMES[args.route])
    name = "E6" if args.k == 2 else "E4"
    print(f"{name}[{args.route}] = {value.real:.7f} {value.imag:+.7f}i")
    return 0


def _cmd_decompose(args, conf) -> int:
    with open(args.matrix) as fh:
        rows = json.load(fh)
    iso = Isometry(np.array(rows, dtype=float))
    dec = decompose_isometry(iso)
    print(f"dim {dec.dim}: {len(dec.good_pairs)} good pair(s), {len(dec.bad_pairs)} bad pair(s)")
    for i, j in dec.good_pairs:
        print(f"  good: A e_{i} = e_{j}")
    for i, j in dec.bad_pairs:
        print(f"  bad:  A e_{i} = -e_{j}")
    if dec.residual is None:
        print("  residual: empty")
    else:
        print(f"  residual ({dec.residual.shape[0]}x{dec.residual.shape[1]}, no permutation part):")
        for row in dec.residual:
            print("    [" + ", ".join(f"{v: .12f}" for v in row) + "]")
    err = float(np.max(np.abs(dec.reconstruct() - iso.matrix)))
    print(f"  reconstruction error: {err:.3e}")
    return 0


_COMMANDS = {
    "stationary": _cmd_stationary,
    "evolve": _cmd_evolve,
    "approx": _cmd_approx,
    "symmetry": _cmd_symmetry,
    "bounds": _cmd_bounds,
    "functional": _cmd_functional,
    "decompose": _cmd_decompose,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        conf = _resolve_config(args)
        _limit_threads(conf)
        echo = {"command": args.command, **conf}
        for key in ("k", "seed", "t_end", "dt", "eps", "s", "route"):
            value = getattr(args, key, None)
            if value is not None:
                echo.setdefault(key, value)
        print("config:", json.dumps(echo, sort_keys=True))
        return _COMMANDS[args.command](args, conf)
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DivergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
