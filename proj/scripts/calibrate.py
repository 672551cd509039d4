#!/usr/bin/env python3
"""Fit the substrate thickness to the target first frequency, then report the
calibration targets that follow from the fitted design.

Usage:
  scripts/calibrate.py [--fpbh build/tools/fpbh] [--config configs/reference.yaml]
                       [--target-f1 48.4] [--layer 0] [--write]

--write replaces the layer thickness in the config file in place (only the
numeric value on the matching `thickness:` line is touched, so comments and
ordering survive). Without it the fitted value is only reported.
"""

import argparse
import csv
import json
import re
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

# name, relative tolerance, target
TARGETS = [
    ("V_oc(kappa=0.44) [V/N]", 0.15, 57.79),
    ("w_max(kappa=0.44) [m/N]", 0.15, 1.61e-3),
    ("eps_max(kappa=0.44) [1/N]", 0.15, 4.32e-4),
    ("V_oc(kappa=0.88) [V/N]", 0.15, 18.81),
    ("w_max(kappa=0.88) [m/N]", 0.15, 0.41e-3),
    ("eps_max(kappa=0.88) [1/N]", 0.15, 1.12e-4),
    ("R_opt [Ohm]", 0.20, 29e3),
    ("P_peak [W/N^2]", 0.30, 6.7e-3),
]


def run(fpbh, *args):
    r = subprocess.run([str(fpbh), *map(str, args)], capture_output=True, text=True)
    if r.returncode != 0:
        sys.exit(f"fpbh {args[0]} failed ({r.returncode}): {r.stderr.strip()}")
    return r.stdout


def read_rows(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    # Strip the " [unit]" suffix from headers.
    head = [h.split(" [")[0] for h in rows[0]]
    return [dict(zip(head, map(float, r))) for r in rows[1:]]


def write_thickness(config, layer, value):
    lines = Path(config).read_text().splitlines(keepends=True)
    seen = -1
    for i, line in enumerate(lines):
        if re.search(r"\bthickness:", line):
            seen += 1
            if seen == layer:
                lines[i] = re.sub(r"(thickness:\s*)([^,}\s]+(?:\s*(?:mm|um|m)\b)?)", rf"\g<1>{value!r}", line, count=1)
                Path(config).write_text("".join(lines))
                return
    sys.exit(f"no thickness entry for layer {layer} in {config}")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--fpbh", default=ROOT / "build" / "tools" / "fpbh")
    ap.add_argument("--config", default=ROOT / "configs" / "reference.yaml")
    ap.add_argument("--target-f1", type=float, default=48.4)
    ap.add_argument("--layer", type=int, default=0)
    ap.add_argument("--write", action="store_true", help="write the fitted thickness back into the config")
    a = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        run(a.fpbh, "calibrate", "--config", a.config, "--out", tmp / "cal",
            "--target-f1", a.target_f1, "--layer", a.layer)
        summary = json.loads((tmp / "cal" / "calibrated.manifest.json").read_text())["summary"]
        h = summary["thickness"]
        print(f"layer {a.layer} thickness = {h!r} m (f1 = {summary['f1']!r} Hz)")
        fitted = tmp / "cal" / "calibrated.yaml"

        run(a.fpbh, "sweep-kappa", "--config", fitted, "--out", tmp / "k",
            "--grid", "kappa_grid.min=0.44", "kappa_grid.max=0.88", "kappa_grid.points=2")
        rows = {round(r["kappa"], 2): r for r in read_rows(tmp / "k" / "sweep_kappa.csv")}
        run(a.fpbh, "sweep-load", "--config", fitted, "--out", tmp / "l")
        load = json.loads((tmp / "l" / "sweep_load.manifest.json").read_text())["summary"]

    got = [rows[0.44]["V_oc"], rows[0.44]["w_max"], rows[0.44]["eps_max"],
           rows[0.88]["V_oc"], rows[0.88]["w_max"], rows[0.88]["eps_max"],
           load["optimal_load"], load["peak_power"]]
    met = 0
    for (name, tol, target), v in zip(TARGETS, got):
        ok = abs(v - target) <= tol * abs(target)
        met += ok
        print(f"{'ok  ' if ok else 'miss'} {name:28s} {v:12.5g}  target {target:.5g} +/-{tol * 100:.0f}%")
    print(f"{met}/{len(TARGETS)} targets met")

    if a.write:
        write_thickness(a.config, a.layer, h)
        print(f"wrote thickness to {a.config}")


if __name__ == "__main__":
    main()
