"""Sweep the Monte Carlo sample count M and compare training outcomes.

More sample paths mean a smoother effective activation (variance |x|/M
on the negative branch) at proportionally higher sampling cost inside
every forward pass.  The sweep trains one model per (M, seed) cell and
reports MSE, R-squared, learned alpha, and the convergence epoch.
Writes sensitivity.csv / sensitivity.json under demos/output/sensitivity/.
"""

import os

from brownian_lstm import ExperimentConfig, TrainConfig, run_sensitivity

OUT_DIR = os.path.join(os.path.dirname(__file__), "output", "sensitivity")


def _print_report(report):
    widths = [max(len(str(header)), 12) for header in report.header]
    row_text = "  ".join(h.ljust(w) for h, w in zip(report.header, widths))
    print(row_text)
    for row in report.rows:
        cells = []
        for value, width in zip(row, widths):
            if value is None:
                cells.append("".ljust(width))
            elif isinstance(value, float):
                cells.append(f"{value:.6f}".ljust(width))
            else:
                cells.append(str(value).ljust(width))
        print("  ".join(cells))


def main():
    config = ExperimentConfig(
        synth="sine:7,600",
        activations=("brownian",),
        m_values=(100, 500, 1000),
        lookback=30,
        hidden_dim=32,
        seeds=(1, 2),
        out_dir=OUT_DIR,
        train=TrainConfig(max_epochs=30, batch_size=32),
    )
    report = run_sensitivity(config)
    _print_report(report)
    csv_path, json_path = report.write(OUT_DIR, "sensitivity")
    print(f"\nwrote {csv_path}")
    print(f"wrote {json_path}")


if __name__ == "__main__":
    main()
