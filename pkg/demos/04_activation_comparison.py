"""Race all six activations on the identical forecasting task.

Every run shares the dataset, split, architecture, optimizer, and seed;
only the cell/output activation changes.  The stochastic activation
reports its Monte Carlo sample count and learned alpha; PReLU learns a
deterministic slope; the rest have no extra parameter.  Writes
comparison.csv / comparison.json under demos/output/comparison/.
"""

import os

from brownian_lstm import ExperimentConfig, TrainConfig, run_comparison

OUT_DIR = os.path.join(os.path.dirname(__file__), "output", "comparison")


def main():
    config = ExperimentConfig(
        synth="sine:7,600",
        m_values=(500,),
        lookback=30,
        hidden_dim=32,
        seeds=(1,),
        out_dir=OUT_DIR,
        train=TrainConfig(max_epochs=30, batch_size=32),
    )
    report = run_comparison(config)

    idx = {name: report.header.index(name) for name in report.header}
    print(f"{'Activation':<14} {'MSE':>10} {'R2(Test)':>10} "
          f"{'Alpha':>8} {'Converged':>10}")
    for row in report.rows:
        alpha = row[idx["Alpha"]]
        alpha_text = f"{alpha:.4f}" if alpha is not None else "-"
        print(f"{row[idx['Activation Function']]:<14} "
              f"{row[idx['MSE']]:>10.6f} {row[idx['R2(Test)']]:>10.4f} "
              f"{alpha_text:>8} {row[idx['Epoch of convergence']]:>10}")

    csv_path, json_path = report.write(OUT_DIR, "comparison")
    print(f"\nwrote {csv_path}")
    print(f"wrote {json_path}")


if __name__ == "__main__":
    main()
