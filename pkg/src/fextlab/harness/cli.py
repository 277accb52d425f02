"""Command-line interface.

Subcommands: extend, kernel, lebesgue, remez, asym, experiment, all-figures.
Configuration precedence: built-in defaults < `fextlab.cfg` (key=value,
`#` comments) < FEXTLAB_PRECISION_BITS < explicit flags.  Exit codes:
0 success, 1 numerical failure (with module diagnostics), 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from ..analysis import remez
from ..arcpoly import build_basis, cd_kernel
from ..errors import FextlabError
from ..fourext import FEProblem, error_norms, extend
from ..mpcore import MPReal, format_scalar, prolate_precision_bits
from .experiments import EXPERIMENTS, asym_table, lebesgue_sweep, run_experiment
from .functions import parse_function

CONFIG_NAME = "fextlab.cfg"
ENV_PRECISION = "FEXTLAB_PRECISION_BITS"


def _load_config(path: Optional[str]) -> dict[str, str]:
    cfg_path = path or (CONFIG_NAME if os.path.exists(CONFIG_NAME) else None)
    if cfg_path is None:
        return {}
    out: dict[str, str] = {}
    with open(cfg_path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line (want key=value): {line!r}")
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--T", type=str, default=None, help="extension half-period ratio (> 1)")
    common.add_argument("--N", type=str, default=None, help="comma-separated odd N values")
    common.add_argument("--precision-bits", type=int, default=None, dest="precision_bits")
    common.add_argument("--epsilon", type=float, default=None, help="eigenvalue truncation threshold")
    common.add_argument("--out", type=str, default=None, help="output directory")
    common.add_argument("--csv", action="store_true", default=None, help="write CSV output")
    common.add_argument("--svg", action="store_true", default=None, help="write SVG plots")
    common.add_argument("--function", type=str, default=None, help="target, e.g. const(1), exp, pole(0,0.6)")
    common.add_argument("--x", type=str, default=None, help="comma-separated evaluation abscissae")
    common.add_argument("--config", type=str, default=None, help="config file (default ./fextlab.cfg)")

    p = argparse.ArgumentParser(prog="fextlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("extend", parents=[common], help="solve one extension problem")
    sub.add_parser("kernel", parents=[common], help="tabulate the prolate kernel K_N")
    sub.add_parser("lebesgue", parents=[common], help="Lebesgue function sweep")
    sub.add_parser("remez", parents=[common], help="best uniform approximation")
    sub.add_parser("asym", parents=[common], help="asymptotic formulas vs exact polynomials")
    exp = sub.add_parser("experiment", parents=[common], help="run a registry experiment")
    exp.add_argument("name", choices=sorted(EXPERIMENTS.keys()))
    sub.add_parser("all-figures", parents=[common], help="run the full experiment registry")
    return p


class _Options:
    """Merged option view: flags over env over config over defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.cfg = _load_config(args.config)

    def _get(self, key: str, default=None):
        val = getattr(self.args, key, None)
        if val is not None:
            return val
        if key in self.cfg:
            return self.cfg[key]
        return default

    @property
    def T(self) -> str:
        return str(self._get("T", "2"))

    @property
    def N_list(self) -> list[int]:
        raw = self._get("N", "5")
        if isinstance(raw, str):
            vals = [int(v) for v in raw.split(",") if v.strip()]
        else:
            vals = [int(raw)]
        if not vals:
            raise ValueError("empty N list")
        return vals

    @property
    def x_list(self) -> list[float]:
        raw = self._get("x", "0")
        return [float(v) for v in str(raw).split(",") if v.strip()]

    def precision_bits(self, N: int) -> int:
        flag = getattr(self.args, "precision_bits", None)
        if flag is not None:
            return int(flag)
        env = os.environ.get(ENV_PRECISION)
        if env:
            return int(env)
        if "precision_bits" in self.cfg:
            return int(self.cfg["precision_bits"])
        return prolate_precision_bits(N)

    @property
    def precision_override(self) -> Optional[int]:
        flag = getattr(self.args, "precision_bits", None)
        if flag is not None:
            return int(flag)
        env = os.environ.get(ENV_PRECISION)
        if env:
            return int(env)
        if "precision_bits" in self.cfg:
            return int(self.cfg["precision_bits"])
        return None

    @property
    def epsilon(self) -> Optional[float]:
        v = self._get("epsilon")
        return None if v is None else float(v)

    @property
    def out(self) -> Optional[str]:
        return self._get("out")

    @property
    def function_text(self) -> str:
        return str(self._get("function", "const(1)"))

    def emit(self, kind: str) -> bool:
        val = self._get(kind)
        if val is None:
            return self.out is not None
        if isinstance(val, str):
            return val.lower() in ("1", "true", "yes", "on")
        return bool(val)


def _cmd_extend(opt: _Options) -> int:
    spec = parse_function(opt.function_text)
    f = spec.build()
    N = opt.N_list[0]
    n = (N - 1) // 2
    problem = FEProblem(opt.T, n, precision_bits=opt.precision_bits(N))
    ext, system = extend(
        f, problem, singularities=spec.singularities, breakpoints=spec.breakpoints, epsilon=opt.epsilon
    )
    print(f"T={opt.T}  N={N}  precision_bits={ext.precision_bits}")
    if opt.epsilon is not None:
        print(f"epsilon={opt.epsilon:g}  retained={system.retained_count} of {N}")
    for k in range(-ext.n, ext.n + 1):
        print(f"  c[{k:+d}] = {format_scalar(ext.coefficient(k), 12)}")
    grid = [MPReal(-1 + 2 * i / 200, ext.precision_bits) for i in range(201)]
    fu = problem.wrap_physical(f)
    norms = error_norms(
        fu,
        ext,
        grid,
        singularities=[float(problem.to_unit_raw(s)) for s in spec.singularities],
        breakpoints=[float(problem.to_unit_raw(s)) for s in spec.breakpoints],
    )
    print(f"sup_error={format_scalar(norms.sup, 6)}  l2_error={format_scalar(norms.l2, 6)}")
    return 0


def _cmd_kernel(opt: _Options) -> int:
    N = opt.N_list[0]
    basis = build_basis(opt.T, N, opt.precision_bits(N))
    samples = 25
    print(f"K_{N}(x, y) at T={opt.T}")
    for x in opt.x_list:
        print(f"x = {x:g}")
        for j in range(samples):
            y = -1 + 2 * j / (samples - 1)
            kv = cd_kernel(x, y, basis, N)
            print(f"  y={y:+.4f}  K={format_scalar(kv.value, 10)}")
    return 0


def _cmd_lebesgue(opt: _Options) -> int:
    rows = lebesgue_sweep(
        opt.x_list,
        opt.N_list,
        opt.T,
        out_dir=opt.out,
        write_csv=opt.emit("csv"),
        write_svg=opt.emit("svg"),
    )
    print("x,N,lambda,panels,tolerance_achieved")
    for r in rows:
        print(f"{r.x:g},{r.N},{r.value:.10e},{r.panels},{r.tolerance_achieved:.2e}")
    return 0


def _cmd_remez(opt: _Options) -> int:
    spec = parse_function(opt.function_text)
    f_mp = spec.build()
    N = opt.N_list[0]
    res = remez(lambda x: f_mp(x), N, opt.T)
    print(f"E = {res.E:.12e}  (N={N}, T={opt.T}, iterations={res.iterations})")
    print(f"alternation points ({len(res.alternation_points)}):")
    for x in res.alternation_points:
        print(f"  {x:+.10f}")
    return 0


def _cmd_asym(opt: _Options) -> int:
    rows = asym_table(opt.N_list, opt.T, out_dir=opt.out, write_csv=opt.emit("csv"))
    print("N,bulk_x,bulk_deviation,edge_x,edge_deviation")
    for r in rows:
        print(f"{r['N']},{r['bulk_x']:g},{r['bulk_dev']:.4e},{r['edge_x']:g},{r['edge_dev']:.4e}")
    return 0


def _cmd_experiment(opt: _Options, name: str) -> int:
    spec = EXPERIMENTS[name]
    record = run_experiment(
        spec,
        out_dir=opt.out,
        write_csv=opt.emit("csv") or opt.out is not None,
        write_svg=opt.emit("svg") or opt.out is not None,
        precision_override=opt.precision_override,
        progress=lambda msg: print(msg, file=sys.stderr),
    )
    print(f"{name}: {len(record.rows)} rows")
    for sl in record.slopes:
        pred = "" if sl.predicted is None else f"  (predicted {sl.predicted:+.3f})"
        print(f"  {sl.function} @{sl.tag}: {sl.kind}={sl.value:+.3f}{pred}")
    return 0


def _cmd_all_figures(opt: _Options) -> int:
    out = opt.out or "figures"
    for name in EXPERIMENTS:
        _cmd_experiment(_clone_with_out(opt, out), name)
    lebesgue_sweep([0.0, 1.0], [17, 33, 65, 129], 2, out_dir=out)
    asym_table([16, 32, 64, 128], 2, out_dir=out)
    print(f"all figures written to {out}/")
    return 0


def _clone_with_out(opt: _Options, out: str) -> _Options:
    import copy

    new = copy.copy(opt)
    args = copy.copy(opt.args)
    args.out = out
    new.args = args
    return new


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        opt = _Options(args)
        if args.command == "extend":
            return _cmd_extend(opt)
        if args.command == "kernel":
            return _cmd_kernel(opt)
        if args.command == "lebesgue":
            return _cmd_lebesgue(opt)
        if args.command == "remez":
            return _cmd_remez(opt)
        if args.command == "asym":
            return _cmd_asym(opt)
        if args.command == "experiment":
            return _cmd_experiment(opt, args.name)
        if args.command == "all-figures":
            return _cmd_all_figures(opt)
        parser.error(f"unknown command {args.command}")
    except FextlabError as exc:
        print(f"numerical failure [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
