"""Word error rate curves for the two published interleavers.

Runs the captioned configurations and archives one CSV per configuration in
``demos/baselines``:

* the 20 x 20 interleaver with RSC (13, 15), 32 decoding iterations;
* the 40 x 40 interleaver with RSC (37, 21), 40 decoding iterations.

Both use alternate puncturing (rate 1/2) and the caption stopping rule of at
least 100 block errors and 500 bit errors per point.  Two things differ from
an unbounded run:

* every point is capped at ``max_frames`` so the recipe finishes at desk
  scale on one core; capped points carry ``censored=1`` in the CSV;
* (37, 21) cannot be tail-biting at N = 1600, because its feedback period 5
  divides 1600.  That configuration starts both encoders in state 0 and
  leaves the final state free (``termination="open"``).

Usage::

    python demos/reproduce_wer_curves.py            # run and archive both baselines
    python demos/reproduce_wer_curves.py --check    # re-run the first point of each and compare
    python demos/reproduce_wer_curves.py --full     # no frame cap (hours on one core)
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from qcturbo import permutation, simulation
from qcturbo.rsc import RscCode
from qcturbo.turbo import TurboCode

BASELINE_DIR = Path(__file__).resolve().parent / "baselines"

RECIPES = {
    "table2_rsc13_15_iter32": dict(
        perm="table2",
        gens="13,15",
        iterations=32,
        termination="tail_biting",
        snr=(0.5, 1.0, 1.5, 2.0, 2.5),
        max_frames=3000,
    ),
    "table3_rsc37_21_iter40": dict(
        perm="table3",
        gens="37,21",
        iterations=40,
        termination="open",
        snr=(0.4, 0.6, 0.8, 1.0),
        max_frames=300,
    ),
}
SEED = 2024
STOP_BLOCKS = 100
STOP_BITS = 500


def build_config(name: str, snr=None, max_frames=None, workers: int = 1) -> simulation.SimConfig:
    recipe = RECIPES[name]
    perm = permutation.load_table2() if recipe["perm"] == "table2" else permutation.load_table3()
    tc = TurboCode(RscCode.from_octal(recipe["gens"]), perm, "alternate", recipe["termination"])
    return simulation.SimConfig(
        tc,
        recipe["snr"] if snr is None else snr,
        iterations=recipe["iterations"],
        min_block_errors=STOP_BLOCKS,
        min_bit_errors=STOP_BITS,
        max_frames=recipe["max_frames"] if max_frames is None else max_frames,
        seed=SEED,
        workers=workers,
    )


def baseline_path(name: str) -> Path:
    return BASELINE_DIR / f"{name}.csv"


def check(name: str) -> bool:
    """Re-run the lowest-SNR point and compare it with the archived row."""
    rows = baseline_path(name).read_text(encoding="utf-8").splitlines()
    first_snr = RECIPES[name]["snr"][0]
    config = build_config(name, snr=(first_snr,))
    fresh = simulation.run(config).to_csv().splitlines()
    return fresh[0] == rows[0] and fresh[1] == rows[1]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--check", action="store_true", help="compare the first point against the baselines")
    parser.add_argument("--full", action="store_true", help="drop the frame cap")
    parser.add_argument("--only", choices=sorted(RECIPES), help="run a single configuration")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)
    names = [args.only] if args.only else list(RECIPES)

    if args.check:
        ok = True
        for name in names:
            same = check(name)
            print(f"{name}: {'matches' if same else 'DIFFERS FROM'} baseline")
            ok &= same
        return 0 if ok else 1

    BASELINE_DIR.mkdir(exist_ok=True)
    for name in names:
        config = build_config(name, max_frames=10_000_000 if args.full else None, workers=args.workers)
        t0 = time.perf_counter()
        result = simulation.run(config)
        simulation.write_csv(result.points, baseline_path(name))
        print(f"{name}: {time.perf_counter() - t0:.0f} s -> {baseline_path(name)}")
        for p in result.points:
            print(f"  {p.ebn0_db:4.2f} dB  frames {p.frames:6d}  WER {p.wer:.3e}  BER {p.ber:.3e}"
                  f"{'  (capped)' if p.censored else ''}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
