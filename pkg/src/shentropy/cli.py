"""Command-line interface.

Exit codes: 0 success, 2 invalid arguments, 3 I/O or file-format failure,
4 numerical failure, 5 order selection did not converge.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import io as shio
from .bench import fit_exponent, run_bench
from .entropy import CRITERIA, NORMALIZATIONS, select_order, she_curve
from .errors import (
    BandLimitError,
    DomainError,
    FileFormatError,
    NoConvergenceError,
    OrderError,
    ShentropyError,
)
from .grid import SphereGrid, equiangular_grid, gauss_grid
from .shapes import KINDS, ShapeSpec, generate
from .transform import (
    CoefficientPyramid,
    SampledSphericalField,
    analyze,
    parseval_check,
    residual_norm,
    synthesize,
)

log = logging.getLogger("shentropy")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC, EXIT_NO_CONVERGENCE = 0, 2, 3, 4, 5


class UsageError(ShentropyError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    input: Path | None = None
    output: Path | None = None
    lmax: int | None = None
    order: int | None = None
    epsilon: float = 1e-6
    window: int = 2
    log_base: str = "e"
    grid: str | None = None
    strategy: str = "recursive"
    criterion: str = "stabilization"
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        known = {k: getattr(ns, k) for k in cls.__dataclass_fields__ if k != "extra" and hasattr(ns, k)}
        extra = {k: v for k, v in vars(ns).items() if k not in cls.__dataclass_fields__ and k != "func"}
        cfg = cls(**known, extra=extra)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.lmax is not None and self.lmax < 0:
            raise UsageError("--lmax must be nonnegative")
        if self.order is not None and self.order < 0:
            raise UsageError("--order must be nonnegative")
        if self.order is not None and self.lmax is not None and self.order > self.lmax:
            raise UsageError(f"--order {self.order} exceeds --lmax {self.lmax}")
        if not self.epsilon > 0:
            raise UsageError("--epsilon must be positive")
        if self.window < 1:
            raise UsageError("--window must be at least 1")
        if self.log_base not in ("e", "2", "10"):
            try:
                b = float(self.log_base)
            except ValueError:
                raise UsageError(f"--log-base must be e, 2, 10 or a positive number, got {self.log_base!r}") from None
            if b <= 0 or b == 1:
                raise UsageError("--log-base must be positive and not 1")
        if self.grid is not None:
            parse_grid(self.grid)
        if self.input is not None and not Path(self.input).exists():
            raise FileNotFoundError(f"input file {self.input} does not exist")


def parse_grid(text: str, default_L: int = 16) -> SphereGrid:
    """``gauss``, ``gauss:L``, ``equiangular:N`` or ``equiangular:NTxNP``."""
    kind, _, size = text.partition(":")
    try:
        if kind == "gauss":
            return gauss_grid(int(size) if size else default_L)
        if kind == "equiangular":
            if not size:
                raise UsageError("equiangular grids need a size, e.g. equiangular:51x51")
            nt, _, np_ = size.partition("x")
            return equiangular_grid(int(nt), int(np_ or nt))
    except ValueError as exc:
        raise UsageError(f"bad grid size in {text!r}: {exc}") from None
    raise UsageError(f"unknown grid {text!r}; use gauss[:L] or equiangular:NTxNP")


def _default_lmax(grid: SphereGrid) -> int:
    return grid.band_limit if grid.band_limit is not None else grid.alias_free_limit


def _pyramid_from_input(cfg: RunConfig) -> tuple[CoefficientPyramid, SampledSphericalField | None]:
    data = shio.read_input(cfg.input)
    if isinstance(data, CoefficientPyramid):
        pyr = data if cfg.lmax is None else data.truncate(cfg.lmax)
        return pyr, None
    L = _default_lmax(data.grid) if cfg.lmax is None else cfg.lmax
    return analyze(data, L, cfg.strategy), data


def _she_table(values, decisions=None) -> str:
    lines = [f"{'J':>4}  {'SHE':>12}" + ("  decision" if decisions else "")]
    for J, v in enumerate(values):
        line = f"{J:>4}  {v:12.6f}"
        if decisions:
            line += f"  {decisions[J]}"
        lines.append(line)
    return "\n".join(lines)


def _require_output(cfg: RunConfig):
    if cfg.output is None:
        raise UsageError(f"{cfg.subcommand} needs --output")


def cmd_synth(cfg: RunConfig) -> int:
    _require_output(cfg)
    kind = cfg.extra["shape"]
    amps = tuple(
        (int(a[0]), int(a[1]), complex(float(a[2]), float(a[3]) if len(a) > 3 else 0.0))
        for a in cfg.extra.get("amplitude") or ()
    )
    spec = ShapeSpec(
        kind,
        max_degree=cfg.lmax or 0,
        amplitudes=amps,
        seed=cfg.seed,
        channels=cfg.extra["channels"],
        scale=cfg.extra["scale"],
    )
    grid = parse_grid(cfg.grid, spec.degree + 4) if cfg.grid else spec.make_grid()
    field_ = generate(spec, grid)
    shio.write_field(cfg.output, field_)
    print(f"wrote {kind} ({field_.channels} channel(s), degree {spec.degree}) "
          f"on {grid.kind} {grid.shape[0]}x{grid.shape[1]} grid -> {cfg.output}")
    return EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    _require_output(cfg)
    data = shio.read_field(cfg.input)
    L = _default_lmax(data.grid) if cfg.lmax is None else cfg.lmax
    pyr = analyze(data, L, cfg.strategy)
    shio.write_pyramid(cfg.output, pyr, include_real_pairs=cfg.extra.get("real_pairs", False))
    spectrum = cfg.extra.get("spectrum") or Path(cfg.output).with_suffix(".spectrum.csv")
    n = shio.write_spectrum(spectrum, pyr)
    pc = parseval_check(data, pyr)
    print(f"analyzed {cfg.input}: L={L}, {pyr.channels} channel(s), {pyr.coeffs.shape[1]} coefficients/channel")
    print(f"Parseval: coefficient energy {pc['coefficient_energy']:.12g}, "
          f"field energy {pc['field_energy']:.12g}, relative difference {pc['relative_error']:.3e}")
    print(f"coefficients -> {cfg.output}; spectrum ({n} rows) -> {spectrum}")
    return EXIT_OK


def cmd_reconstruct(cfg: RunConfig) -> int:
    _require_output(cfg)
    pyr, source = _pyramid_from_input(cfg)
    J = pyr.L if cfg.order is None else cfg.order
    if source is not None:
        grid = source.grid
    else:
        grid = parse_grid(cfg.grid, pyr.L) if cfg.grid else gauss_grid(pyr.L)
    out = synthesize(pyr, grid, J, cfg.strategy)
    shio.write_field(cfg.output, out)
    print(f"reconstructed at J={J} (L={pyr.L}) -> {cfg.output}")
    if source is not None:
        print(f"residual L2 norm: {residual_norm(source, out):.3e}")
    return EXIT_OK


def cmd_entropy(cfg: RunConfig) -> int:
    pyr, _ = _pyramid_from_input(cfg)
    curve = she_curve(pyr, cfg.log_base, cfg.extra.get("normalization", "prefix"))
    if cfg.output:
        shio.write_she_curve(cfg.output, curve)
    print(_she_table(curve.values))
    return EXIT_OK


def cmd_select_order(cfg: RunConfig) -> int:
    pyr, _ = _pyramid_from_input(cfg)
    try:
        report = select_order(pyr, cfg.epsilon, cfg.window, cfg.criterion, cfg.log_base,
                              cfg.extra.get("normalization", "prefix"))
        status = EXIT_OK
    except NoConvergenceError as exc:
        report, status = exc.report, EXIT_NO_CONVERGENCE
        print(f"no convergence: {exc}", file=sys.stderr)
    if cfg.output:
        shio.write_json(cfg.output, report.to_dict())
    print(_she_table([t["she"] for t in report.trace], [t["decision"] for t in report.trace]))
    if status == EXIT_OK:
        print(f"selected order: {report.selected_order} ({report.criterion})"
              + (f" - {report.note}" if report.note else ""))
    return status


def cmd_spectrum(cfg: RunConfig) -> int:
    _require_output(cfg)
    pyr, _ = _pyramid_from_input(cfg)
    n = shio.write_spectrum(cfg.output, pyr)
    print(f"wrote {n} spectrum rows (L={pyr.L}, {pyr.channels} channel(s)) -> {cfg.output}")
    return EXIT_OK


def bench_summary(rows) -> dict:
    out = {}
    for n in sorted({r.n_points for r in rows}):
        for strategy in ("recursive", "direct"):
            sel = sorted((r for r in rows if r.strategy == strategy and r.n_points == n), key=lambda r: r.L)
            if len(sel) >= 2:
                out[(strategy, n)] = {
                    "time_exponent": fit_exponent([r.L for r in sel], [r.per_point_seconds for r in sel]),
                    "flop_exponent": fit_exponent([r.L for r in sel], [r.per_point_flops for r in sel]),
                }
    return out


def cmd_bench(cfg: RunConfig) -> int:
    lmaxes = cfg.extra.get("lmaxes") or [8, 16, 32, 64]
    sizes = cfg.extra.get("points") or [8281]

    def progress(r):
        print(f"{r.strategy:>9}  L={r.L:<3}  N={r.n_points:<6}  {r.seconds:10.4f} s  "
              f"{r.per_point_flops:12.0f} flop/pt", flush=True)

    rows = run_bench(lmaxes, sizes, budget=cfg.extra.get("budget", 1.0), progress=progress)
    if cfg.output:
        shio.write_bench(cfg.output, rows)
    for (strategy, n), fit in bench_summary(rows).items():
        print(f"{strategy:>9}  N={n}: per-point time ~ L^{fit['time_exponent']:.2f}, "
              f"flops ~ L^{fit['flop_exponent']:.2f}")
    for n in sizes:
        for L in lmaxes:
            t = {r.strategy: r.seconds for r in rows if r.n_points == n and r.L == L}
            if t.get("recursive"):
                print(f"speedup recursive vs direct at N={n}, L={L}: {t['direct'] / t['recursive']:.2f}x")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shentropy", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, inp=True, out=True):
        if inp:
            sp.add_argument("--input", type=Path, required=True,
                            help="field CSV, or coefficient JSON where accepted")
        if out:
            sp.add_argument("--output", type=Path)
        sp.add_argument("--lmax", type=int, help="band limit L")
        sp.add_argument("--strategy", choices=("recursive", "direct"), default="recursive")

    sp = sub.add_parser("synth", help="generate a synthetic shape")
    common(sp, inp=False)
    sp.add_argument("--shape", choices=KINDS, default="random-bandlimited")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--channels", type=int, choices=(1, 3), default=1)
    sp.add_argument("--scale", type=float, default=0.3)
    sp.add_argument("--amplitude", nargs="+", action="append", metavar="L M RE [IM]",
                    help="radial bump term; repeatable")
    sp.add_argument("--grid", help="gauss[:L] or equiangular:NTxNP")
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("analyze", help="field -> coefficients + spectrum")
    common(sp)
    sp.add_argument("--spectrum", type=Path)
    sp.add_argument("--real-pairs", action="store_true", help="also export real (a, b) pairs")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("reconstruct", help="truncated synthesis at --order")
    common(sp)
    sp.add_argument("--order", type=int)
    sp.add_argument("--grid", help="output grid for coefficient input")
    sp.set_defaults(func=cmd_reconstruct)

    for name, func, help_ in (("entropy", cmd_entropy, "SHE curve"),
                              ("select-order", cmd_select_order, "optimal order from SHE")):
        sp = sub.add_parser(name, help=help_)
        common(sp)
        sp.add_argument("--log-base", default="e")
        sp.add_argument("--normalization", choices=NORMALIZATIONS, default="prefix")
        if name == "select-order":
            sp.add_argument("--epsilon", type=float, default=1e-6)
            sp.add_argument("--window", type=int, default=2)
            sp.add_argument("--criterion", choices=CRITERIA, default="stabilization")
        sp.set_defaults(func=func)

    sp = sub.add_parser("spectrum", help="coefficient spectrum CSV")
    common(sp)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("bench", help="time direct vs recursive basis evaluation")
    sp.add_argument("--output", type=Path)
    sp.add_argument("--lmax", type=int, nargs="+", dest="lmaxes")
    sp.add_argument("--points", type=int, nargs="+")
    sp.add_argument("--budget", type=float, default=1.0, help="seconds of repeats per cell")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.from_args(ns)
        return ns.func(cfg)
    except (UsageError, BandLimitError, OrderError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, FileFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ShentropyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ArithmeticError, ValueError) as exc:
        log.debug("numerical failure", exc_info=True)
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
