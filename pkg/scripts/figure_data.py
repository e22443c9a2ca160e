"""Write the alpha-sweep curves behind the probability and fidelity figures.

Each curve goes to ``<out>/<quantity>.dat`` as two gnuplot-ready columns.
With ``--plot`` (needs matplotlib) a PNG per figure is written as well.

    python3 scripts/figure_data.py --out figures --workers 4 --plot
"""

import argparse
import pathlib

from ququat.analysis import DEFAULT_GRID, alpha_grid, sweep
from ququat.cli import fmt

FIGURES = {
    "probabilities_a": ["P_I_max", "P_IV_sum_min"],
    "probabilities_b": ["P_II_max", "P_III1_max"],
    "fidelities": ["MASFI_F5", "MASFI_F6", "MASFI_F9", "MAVFI"],
}


def write_curve(path: pathlib.Path, quantity: str, records) -> None:
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"# alpha {quantity}\n")
        for r in records:
            fh.write(f"{fmt(r.alpha)} {fmt(r.value)}\n")


def plot(path: pathlib.Path, curves: dict) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for name, records in curves.items():
        ax.plot([r.alpha for r in records], [r.value for r in records], label=name)
    ax.set_xlabel("|alpha|")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="figures")
    p.add_argument("--figure", choices=[*FIGURES, "all"], default="all")
    p.add_argument("--start", type=float, default=DEFAULT_GRID[0])
    p.add_argument("--stop", type=float, default=DEFAULT_GRID[1])
    p.add_argument("--step", type=float, default=DEFAULT_GRID[2])
    p.add_argument("--fail-policy", choices=("zero", "overlap"), default="zero")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--plot", action="store_true")
    args = p.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = alpha_grid(args.start, args.stop, args.step)
    names = FIGURES if args.figure == "all" else {args.figure: FIGURES[args.figure]}
    for fig_name, quantities in names.items():
        curves = {}
        for q in quantities:
            curves[q] = sweep(q, grid, args.fail_policy, args.workers)
            write_curve(out / f"{q}.dat", q, curves[q])
            print(f"wrote {out / f'{q}.dat'}")
        if args.plot:
            plot(out / f"{fig_name}.png", curves)
            print(f"wrote {out / f'{fig_name}.png'}")


if __name__ == "__main__":
    main()
