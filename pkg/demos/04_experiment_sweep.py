"""Seeded sweep over both bundled scenario presets, written out as CSV."""

import statistics
from pathlib import Path

from capsched import CompareSpec, Config, SCENARIO_PRESETS, ScenarioParams, run_compare


def main():
    out_dir = Path("sweep_out")
    out_dir.mkdir(exist_ok=True)

    for name, preset in sorted(SCENARIO_PRESETS.items()):
        spec = CompareSpec(
            config=Config(n=preset["n"], delta=preset["delta"], theta=preset["theta"]),
            scenario=ScenarioParams(
                name=name,
                amplitude=preset["amplitude"],
                plateau_fraction=preset["plateau_fraction"],
            ),
            seeds=tuple(range(20)),
            algorithms=("ads", "greedy"),
        )
        csv_text = run_compare(spec)
        path = out_dir / f"{name}.csv"
        path.write_text(csv_text)

        # pull per planner medians back out of the rows
        costs = {}
        for line in csv_text.splitlines()[1:]:
            if line.startswith("#"):
                continue
            seed, algorithm, rc, qos, cap, req, feasible = line.split(",")
            costs.setdefault(algorithm, []).append(int(rc))
        print(f"{name}: wrote {path}")
        for algorithm in sorted(costs):
            print(f"   {algorithm:6s} median resource cost "
                  f"{statistics.median(costs[algorithm]):.1f} over {len(costs[algorithm])} seeds")


if __name__ == "__main__":
    main()
