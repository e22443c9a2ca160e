"""Command-line entry point.

Every command writes comma-separated text with a header line (``--format
rows``, the default) or the same data as aligned columns (``--format
table``).  Lines starting with ``#`` are comments or footers.  Real numbers
use 17 significant digits and complex numbers are written ``re+imi``.

Exit status: 0 on success, 1 when a self-check fails, 2 on usage errors, 3 on
domain or resource errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import analysis
from .basis import alpha_j_state, c_from_eps, ecs_state, make_basis, normalize_c
from .coherent import inner_product
from .errors import ArityError, DegenerateInputError, DomainError, ResourceError
from .fock import oracle_compare
from .generation import ecs_from_heralded, run_generation, split_basis
from .tables import verify_tables
from .teleport import TeleportSimulator, encode_outcome, enumerate_pc_classes, teleport_fidelity, unitary_U

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3
ORTHONORMALITY_TOL = 1e-10
ORACLE_TOL = 1e-8
DEFAULT_TABLE_SAMPLES = (
    (1, 0, 0, 0),
    (0.5, 0.5, 0.5, 0.5),
    (0.6, 0.3j, -0.5, 0.2 - 0.5j),
    (0.1, 0.7, 0.2j, -0.67),
    (0.4 + 0.3j, -0.2, 0.6, 0.5j),
)


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (complex, np.complexfloating)):
        return f"{x.real:.17g}{x.imag:+.17g}i"
    if isinstance(x, (float, np.floating)):
        return f"{x:.17g}"
    return str(x)


def parse_complex(token: str) -> complex:
    t = token.strip().replace(" ", "")
    if t.endswith("i"):
        t = t[:-1] + "j"
    try:
        return complex(t)
    except ValueError:
        raise UsageError(f"cannot parse {token!r} as a complex number") from None


def parse_quad(text: str) -> np.ndarray:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 4:
        raise UsageError(f"expected four comma-separated values, got {len(parts)}")
    return np.array([parse_complex(p) for p in parts])


@dataclass(frozen=True)
class RunConfig:
    command: str
    alpha: Optional[float]
    alpha_grid: Optional[tuple[float, float, float]]
    info_c: Optional[np.ndarray]
    info_eps: Optional[np.ndarray]
    channel: int
    fail_policy: str
    out: Optional[str]
    format: str
    quantity: str
    cutoff_override: Optional[int]
    plot_data: Optional[str]
    worst_case: bool
    workers: int

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        grid_flags = (ns.alpha_start, ns.alpha_stop, ns.alpha_step)
        has_grid = any(v is not None for v in grid_flags)
        if ns.alpha is not None and has_grid:
            raise UsageError("give either --alpha or the --alpha-start/stop/step grid, not both")
        grid = None
        if has_grid:
            if ns.command != "sweep":
                raise UsageError("grid flags are only valid for sweep")
            d = analysis.DEFAULT_GRID
            grid = tuple(d[i] if v is None else v for i, v in enumerate(grid_flags))
            if grid[2] <= 0:
                raise UsageError("--alpha-step must be positive")
        if ns.info_c is not None and ns.info_eps is not None:
            raise UsageError("give either --info-c or --info-eps, not both")
        return cls(
            command=ns.command,
            alpha=ns.alpha,
            alpha_grid=grid,
            info_c=None if ns.info_c is None else parse_quad(ns.info_c),
            info_eps=None if ns.info_eps is None else parse_quad(ns.info_eps),
            channel=ns.channel,
            fail_policy=ns.fail_policy,
            out=ns.out,
            format=ns.format,
            quantity=ns.quantity,
            cutoff_override=ns.cutoff_override,
            plot_data=ns.plot_data,
            worst_case=ns.worst_case,
            workers=ns.workers,
        )

    def require_alpha(self, default: Optional[float] = None) -> float:
        if self.alpha is None:
            if default is None:
                raise UsageError(f"{self.command} needs --alpha")
            return default
        return self.alpha

    def info(self, basis) -> np.ndarray:
        """Normalized c vector; defaults to equal weights."""
        if self.info_eps is not None:
            return c_from_eps(self.info_eps, basis)
        if self.info_c is not None:
            return normalize_c(self.info_c)
        return np.full(4, 0.5, dtype=complex)


# -- output -------------------------------------------------------------------------

class Sheet:
    """Collects header/rows/comments and renders them in the chosen format."""

    def __init__(self, header: Sequence[str]):
        self.header = list(header)
        self.rows: list[list[str]] = []
        self.footer: list[str] = []

    def add(self, *values):
        self.rows.append([fmt(v) for v in values])

    def note(self, text: str):
        self.footer.append(f"# {text}")

    def render(self, style: str) -> str:
        if style == "table":
            widths = [max(len(h), *(len(r[i]) for r in self.rows)) if self.rows else len(h)
                      for i, h in enumerate(self.header)]
            lines = ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip()
                     for row in [self.header] + self.rows]
        else:
            lines = [",".join(row) for row in [self.header] + self.rows]
        return "\n".join(lines + self.footer) + "\n"


def _emit(cfg: RunConfig, sheets: Sequence[Sheet]):
    text = "".join(s.render(cfg.format) for s in sheets)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- commands -------------------------------------------------------------------------

def cmd_states(cfg: RunConfig) -> int:
    basis = make_basis(cfg.require_alpha())
    sheet = Sheet(["name", "j", "k", "value"])
    for j in range(4):
        sheet.add("N", j, "", basis.N[j])
    for j in range(4):
        sheet.add("r", j, "", basis.r[j])
    for j in range(5):
        sheet.add("a", j, "", basis.a[j])
    sheet.add("N4", "", "", basis.N4)
    states = [alpha_j_state(basis, j) for j in range(4)]
    gram = np.array([[inner_product(a, b) for b in states] for a in states])
    for j in range(4):
        for k in range(4):
            sheet.add("gram", j, k, complex(gram[j, k]))
    dev = float(np.max(np.abs(gram - np.eye(4))))
    sheet.note(f"orthonormality_deviation={fmt(dev)}")
    _emit(cfg, [sheet])
    return EXIT_OK if dev < ORTHONORMALITY_TOL else EXIT_CHECK


def cmd_teleport(cfg: RunConfig) -> int:
    basis = make_basis(cfg.require_alpha())
    if cfg.worst_case:
        c = analysis.worst_case_info(basis, cfg.fail_policy, cfg.channel)
    else:
        c = cfg.info(basis)
    sim = TeleportSimulator(basis, cfg.channel)
    sheet = Sheet(["code", "symbols", "group", "probability", "purity", "correction",
                   "success", "fidelity_form", "fidelity"])
    total = favg = 0.0
    for pc in enumerate_pc_classes():
        out = sim.measure(c, pc)
        corr, ok, fid_id = sim.derived_correction(pc)
        # failed classes are scored without a correction
        applied = corr if corr.kind != "none_fail" else unitary_U(0, 0)
        f = teleport_fidelity(out, applied, c) if out.defined else float("nan")
        total += out.probability
        if out.defined and (ok or cfg.fail_policy == "overlap"):
            favg += out.probability * f
        sheet.add(encode_outcome(pc), pc.label().replace(",", " "), pc.group, out.probability,
                  out.purity, corr.label, int(ok), fid_id, f)
    sheet.note(f"alpha={fmt(float(basis.alpha.real))} channel={cfg.channel} fail_policy={cfg.fail_policy}")
    sheet.note("info_c=" + " ".join(fmt(complex(v)) for v in c))
    sheet.note(f"probability_sum={fmt(total)}")
    sheet.note(f"favg={fmt(favg)}")
    _emit(cfg, [sheet])
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.quantity not in analysis.QUANTITIES:
        raise UsageError(f"unknown quantity {cfg.quantity!r}; choose from {', '.join(analysis.QUANTITIES)}")
    if cfg.alpha is not None:
        grid = [cfg.alpha]
    else:
        grid = analysis.alpha_grid(*(cfg.alpha_grid or analysis.DEFAULT_GRID))
    records = analysis.sweep(cfg.quantity, grid, cfg.fail_policy, cfg.workers)
    sheet = Sheet(["alpha", "quantity", "value"])
    for r in records:
        sheet.add(r.alpha, r.quantity, r.value)
    _emit(cfg, [sheet])
    if cfg.plot_data:
        with open(cfg.plot_data, "w", encoding="utf-8") as fh:
            fh.write(f"# alpha {cfg.quantity}\n")
            for r in records:
                fh.write(f"{fmt(r.alpha)} {fmt(r.value)}\n")
    return EXIT_OK


def cmd_generate(cfg: RunConfig) -> int:
    basis = make_basis(cfg.require_alpha())
    half = split_basis(basis)
    sheet = Sheet(["j", "probability", "closed_form", "ecs_overlap"])
    for o in run_generation(basis):
        ecs = ecs_from_heralded(o.heralded_state, basis)
        ov = abs(inner_product(ecs_state(half, o.j), ecs))
        sheet.add(o.j, o.probability, o.closed_form, ov)
    _emit(cfg, [sheet])
    return EXIT_OK


def cmd_verify_tables(cfg: RunConfig) -> int:
    basis = make_basis(cfg.require_alpha(2.0))
    samples = [cfg.info(basis)] if (cfg.info_c is not None or cfg.info_eps is not None) else []
    samples += [np.asarray(s, dtype=complex) for s in DEFAULT_TABLE_SAMPLES]
    report = verify_tables(basis, samples, cfg.channel)
    checks = Sheet(["table", "row", "class", "claimed_bob", "claimed_correction", "claimed_fidelity",
                    "derived_bob", "derived_correction", "derived_fidelity", "bob_match",
                    "correction_optimal", "fidelity_match", "correction_agrees"])
    for c in report.checks:
        checks.add(c.table, c.row, c.pc_class.label().replace(",", " "), c.claimed_bob, c.claimed_correction,
                   c.claimed_fidelity, c.derived_bob or "-", c.derived_correction, c.derived_fidelity,
                   int(c.bob_match), int(c.correction_optimal), int(c.fidelity_match), int(c.correction_agrees))
    checks.note(f"diffs={len(report.diffs)}")
    diffs = Sheet(["table", "class", "issue", "claimed", "derived"])
    for d in report.diffs:
        diffs.add(d["table"], d["pc_class"].replace(",", " "), d["issue"].replace(",", ";"),
                  d["claimed"], d["derived"])
    _emit(cfg, [checks, diffs])
    return EXIT_OK


def cmd_oracle_check(cfg: RunConfig) -> int:
    basis = make_basis(cfg.require_alpha(2.0))
    report = oracle_compare(basis, cfg.info(basis), cfg.channel, cfg.cutoff_override)
    sheet = Sheet(["check", "deviation"])
    for name, dev in report.rows():
        sheet.add(name, dev)
    sheet.note(f"cutoff={report.cutoff}")
    sheet.note(f"max_deviation={fmt(report.max_deviation)}")
    _emit(cfg, [sheet])
    return EXIT_OK if report.max_deviation < ORACLE_TOL else EXIT_CHECK


COMMANDS = {
    "states": cmd_states,
    "teleport": cmd_teleport,
    "sweep": cmd_sweep,
    "generate": cmd_generate,
    "verify-tables": cmd_verify_tables,
    "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, help="coherent amplitude (real)")
    common.add_argument("--alpha-start", type=float)
    common.add_argument("--alpha-stop", type=float)
    common.add_argument("--alpha-step", type=float)
    common.add_argument("--info-c", help="c_0..c_3, comma separated (use --info-c=... for a leading minus)")
    common.add_argument("--info-eps", help="epsilon weights on |alpha>, |i alpha>, |-alpha>, |-i alpha>")
    common.add_argument("--channel", type=int, choices=range(4), default=0)
    common.add_argument("--fail-policy", choices=analysis.FAIL_POLICIES, default="zero")
    common.add_argument("--quantity", default="MAVFI", help=f"one of {', '.join(analysis.QUANTITIES)}")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("rows", "table"), default="rows")
    common.add_argument("--cutoff-override", type=int)
    common.add_argument("--plot-data", help="sweep only: write 'alpha value' columns here")
    common.add_argument("--worst-case", action="store_true", help="teleport only: use the MAVFI minimizer")
    common.add_argument("--workers", type=int, default=1, help="sweep only: parallel processes")
    parser = argparse.ArgumentParser(prog="ququat", description="Ququat teleportation simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__doc__)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (UsageError, ArityError, DegenerateInputError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ResourceError) as exc:
        print(f"{parser.prog}: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
