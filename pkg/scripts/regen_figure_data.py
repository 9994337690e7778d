"""Regenerate every figure data table from its checked-in config.

Each table can also be produced by hand with the CLI; this script just
runs the four commands in sequence:

    qlinksim dv-sweep     --config configs/fig2_dv_rates.ini    --out data/fig2_dv_rates.csv
    qlinksim cv-sweep     --config configs/fig3_cv_rates.ini    --out data/fig3_cv_rates.csv
    qlinksim atmos-grid   --config configs/fig4_attenuation.ini --out data/fig4_attenuation.csv
    qlinksim thermal-grid --config configs/fig5_thermal.ini     --out data/fig5_thermal.csv

Output is deterministic: re-running writes byte-identical files.
"""

from __future__ import annotations

import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from qlinksim.cli import main as cli_main

FIGURES = (
    ("dv-sweep", "fig2_dv_rates"),
    ("cv-sweep", "fig3_cv_rates"),
    ("atmos-grid", "fig4_attenuation"),
    ("thermal-grid", "fig5_thermal"),
)


def main() -> int:
    out_dir = REPO / "data"
    out_dir.mkdir(exist_ok=True)
    for scenario, stem in FIGURES:
        config = REPO / "configs" / f"{stem}.ini"
        out = out_dir / f"{stem}.csv"
        code = cli_main(
            [scenario, "--config", str(config), "--out", str(out), "--workers", "1"]
        )
        if code != 0:
            print(f"{scenario} failed with exit code {code}", file=sys.stderr)
            return code
        print(f"wrote {out.relative_to(REPO)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
