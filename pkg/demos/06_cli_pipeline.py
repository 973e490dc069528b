"""End-to-end pipeline through the command-line interface.

Writes a tiny price history, then drives three subcommands the same
way a shell script would: ingest the prices into log returns, fit the
return variance, and let two likelihoods compete on a positive-valued
series.  Everything lands in demo_out/ next to this script.
"""
import math
import pathlib
import sys

from betsim.cli import dispatch
from betsim import rng as streams

here = pathlib.Path(__file__).resolve().parent
out = here / "demo_out"
out.mkdir(exist_ok=True)

# a smooth price path with one rough patch in the middle
prices = out / "prices.csv"
rows = ["t,price"]
level = 100.0
for i in range(60):
    bump = 0.012 if 25 <= i < 35 else 0.004
    level *= math.exp(bump if i % 2 == 0 else -bump)
    rows.append(f"{i},{level:.6f}")
prices.write_text("\n".join(rows) + "\n")

# positive waiting times for the model comparison
waits = out / "waits.csv"
draws = streams.stream(9, streams.GENERIC).exponential(0.5, 200)
waits.write_text("i,value\n" + "\n".join(f"{i},{float(v)!r}" for i, v in enumerate(draws)) + "\n")

(out / "ingest.ini").write_text(
    f"[io]\ninput = {prices}\n\n[superstat]\ntau = 1\n"
)
(out / "fit.ini").write_text(
    f"[io]\ninput = {out / 'ingested' / 'returns.csv'}\n\n"
    "[inference]\nprior_alpha = 2.0\nprior_beta = 0.001\n"
)
(out / "cmp.ini").write_text(
    f"[io]\ninput = {waits}\n\n[inference]\nprior_alpha = 2.0\nprior_beta = 0.001\n"
)

steps = [
    ["ingest", "--config", str(out / "ingest.ini"), "--out", str(out / "ingested")],
    ["fit-variance", "--config", str(out / "fit.ini"), "--out", str(out / "fitted")],
    ["compare-models", "--config", str(out / "cmp.ini"), "--out", str(out / "compared")],
]
for argv in steps:
    code = dispatch(argv)
    print(f"$ betsim {' '.join(argv)}")
    print(f"  exit {code}")
    if code != 0:
        sys.exit(code)

print()
for path in sorted(out.rglob("*.csv")):
    print(f"wrote {path.relative_to(here)}")

print()
print("fit summary:")
print((out / "fitted" / "fit.csv").read_text())
print("model comparison (the exponential should win on exponential data):")
print((out / "compared" / "models.csv").read_text())
