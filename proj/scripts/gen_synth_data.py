#!/usr/bin/env python3
"""Regenerates the bundled synthetic datasets under data/.

The generator is a fixed xorshift so the files are reproducible byte-for-byte;
they are checked in, so running this is only needed when changing the recipe.
"""
import os

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")

NAMES = ["TCH1", "TCH2", "FIN1", "FIN2", "HLT1", "HLT2", "SVC1", "SVC2"]
SECTORS = {
    "Technology": ["TCH1", "TCH2"],
    "Finance": ["FIN1", "FIN2"],
    "Healthcare": ["HLT1", "HLT2"],
    "Services": ["SVC1", "SVC2"],
}
T = 200


class Rng:
    def __init__(self, seed=0x9E3779B97F4A7C15):
        self.s = seed & 0xFFFFFFFFFFFFFFFF

    def uniform(self):
        self.s ^= (self.s << 13) & 0xFFFFFFFFFFFFFFFF
        self.s ^= self.s >> 7
        self.s ^= (self.s << 17) & 0xFFFFFFFFFFFFFFFF
        return (self.s >> 11) * 2.0**-53

    def range(self, lo, hi):
        return lo + (hi - lo) * self.uniform()


def main():
    os.makedirs(DATA, exist_ok=True)
    rng = Rng()

    # Sector shocks with negative autocorrelation (gives the mean-reversion
    # strategies something to trade) plus idiosyncratic noise.
    rows = []
    prev_shock = [0.0] * 4
    for t in range(T):
        shocks = []
        for j in range(4):
            s = -0.55 * prev_shock[j] + rng.range(-1.0, 1.0)
            shocks.append(s)
        prev_shock = shocks
        row = []
        for i in range(8):
            v = 1.0 + 0.008 * shocks[i // 2] + 0.006 * rng.range(-1.0, 1.0)
            v = min(max(v, 0.985), 1.015)
            row.append(round(v, 6))
        rows.append(row)

    with open(os.path.join(DATA, "synth_relatives.csv"), "w", newline="\n") as f:
        f.write("date," + ",".join(NAMES) + "\n")
        for t, row in enumerate(rows):
            f.write("d%04d," % (t + 1) + ",".join("%.6f" % v for v in row) + "\n")

    with open(os.path.join(DATA, "synth_sectors.txt"), "w", newline="\n") as f:
        f.write("# 4-sector partition of the synthetic universe\n")
        for name, members in SECTORS.items():
            f.write("%s: %s\n" % (name, ",".join(members)))

    with open(os.path.join(DATA, "flat2.csv"), "w", newline="\n") as f:
        f.write("AAA,BBB\n")
        for _ in range(30):
            f.write("1,1\n")

    with open(os.path.join(DATA, "flat2_sectors.txt"), "w", newline="\n") as f:
        f.write("Left: AAA\nRight: BBB\n")

    # Raw close prices (converted to relatives by data.mode = raw_prices).
    rng2 = Rng(0xD1B54A32D192ED03)
    prices = [[100.0, 50.0, 25.0]]
    for _ in range(10):
        prices.append([round(p * (1.0 + 0.01 * rng2.range(-1.0, 1.0)), 4) for p in prices[-1]])
    with open(os.path.join(DATA, "raw_prices_sample.csv"), "w", newline="\n") as f:
        f.write("date,AAA,BBB,CCC\n")
        for t, row in enumerate(prices):
            f.write("p%03d," % t + ",".join("%.4f" % v for v in row) + "\n")


if __name__ == "__main__":
    main()
