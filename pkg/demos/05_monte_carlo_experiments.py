"""Run scaled-down versions of the Monte-Carlo experiments.

The full-size runs (100 trials per cell) live behind the command line:

    hankelmc convergence --out out/convergence
    hankelmc phase       --out out/phase
    hankelmc beam        --out out/beam
    hankelmc doa         --out out/doa

This script uses small trial counts so it finishes in about a minute and
writes CSV tables plus self-contained SVG plots into demo_out/.
"""

from pathlib import Path

from hankelmc import (GridSpec, default_doa_scenario, default_scenario,
                      run_beam_pattern, run_convergence, run_doa_grid,
                      run_phase_transition)
from hankelmc.experiments import Algorithm

out = Path("demo_out")
out.mkdir(exist_ok=True)

print("1) error vs iteration at 10 dB SSR, 30% failed channels ...")
res = run_convergence(default_scenario(seed=0), trials=10, n_iters=10,
                      out_dir=out / "convergence")
for name, trace in res["medians"].items():
    print(f"   {name:>3}: median nrmse per iteration "
          + " ".join(f"{v:.3f}" for v in trace[:5]) + " ...")

print("2) recovery-probability grid (10 trials per cell) ...")
grid = GridSpec(ssr_values=(-5.0, 5.0, 15.0), failure_fractions=(0.0, 0.2, 0.4),
                trials_per_cell=10)
result = run_phase_transition(grid, default_scenario(seed=0),
                              out_dir=out / "phase")
for algo in (Algorithm.L1, Algorithm.L2):
    line = " ".join(f"{result.cell(algo.value, s, f).prob:.1f}"
                    for s in grid.ssr_values for f in grid.failure_fractions)
    print(f"   {algo.value:>3}: per-cell probability {line}")

print("3) averaged beam patterns (10 trials) ...")
res = run_beam_pattern(default_scenario(seed=0), trials=10,
                       out_dir=out / "beam")
for name, m in res["metrics"].items():
    print(f"   {name:>3}: beamwidth {m['beamwidth_deg']:.2f} deg, "
          f"peak sidelobe {m['peak_sidelobe_db']:.1f} dB")

print("4) bearing-error grid (4 trials per cell, reduced axes) ...")
doa_grid = GridSpec(ssr_values=(0.0, 10.0), failure_fractions=(0.2, 0.3),
                    trials_per_cell=4)
result = run_doa_grid(doa_grid, default_doa_scenario(seed=0),
                      out_dir=out / "doa")
for c in result.cells:
    print(f"   {c.algo:>3} SSR={c.ssr_db:5.1f} frac={c.failure_fraction}: "
          f"rmse {c.doa_rmse:7.3f} deg {'pass' if c.passed else 'fail'}")

print(f"\ntables and SVG plots in {out}/")
