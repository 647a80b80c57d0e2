#!/usr/bin/env python3
"""Solver scaling study on random scenes.

For each (objects, classes) cell: model size, LP wall time, branch-and-bound
node counts, and agreement with the exhaustive oracle where it is tractable.

    python scripts/solver_benchmark.py [--trials 20] [--seed 0]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))
sys.path.insert(0, str(REPO / "tests"))

from conftest import random_support_problem
from supportgraph.config import EnergyWeights
from supportgraph.solver import SolveStats, build_ip, exhaustive_minimize, solve_support


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    weights = EnergyWeights()
    print(f"{'N':>3} {'V':>3} {'vars':>6} {'rows':>5} {'t_mean(ms)':>11} {'nodes_max':>9} {'oracle':>7}")
    for n in (2, 3, 4, 5, 6):
        for v in (3, 6):
            times = []
            worst_nodes = 0
            agree = True
            model_dims = None
            for trial in range(args.trials):
                problem = random_support_problem(rng, n, v, quantize=(trial % 2 == 0))
                if model_dims is None:
                    model = build_ip(problem, weights)
                    model_dims = (model.n_vars, len(model.b_eq) + len(model.b_ub))
                stats = SolveStats()
                start = time.perf_counter()
                sol = solve_support(problem, weights, stats=stats)
                times.append(time.perf_counter() - start)
                worst_nodes = max(worst_nodes, stats.nodes)
                if n <= 6:
                    oracle = exhaustive_minimize(problem, weights, max_n=6)
                    agree = agree and abs(sol.energy - oracle.energy) <= 1e-9
            print(
                f"{n:>3} {v:>3} {model_dims[0]:>6} {model_dims[1]:>5} "
                f"{1e3 * np.mean(times):>11.1f} {worst_nodes:>9} {'ok' if agree else 'FAIL':>7}"
            )


if __name__ == "__main__":
    main()
