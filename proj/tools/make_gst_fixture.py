#!/usr/bin/env python3
# Copyright 2026 The Driftlock Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Builds configs/gst_fixture.csv: two-outcome circuits whose per-length
2*dlogL totals are fixed numbers, for checking aggregation and rendering.

Each circuit gets counts (n, N - n); its model probability p is solved by
bisection so that the circuit's statistic hits an assigned share of the
length total.
"""

import math
import sys

TOTALS = {1: 475.7, 2: 3122.8, 4: 4805.3, 8: 6169.1, 16: 8445.5}
GERMS = ["Gx", "Gy", "Gi", "GxGy", "GxGxGy", "GxGyGi", "GyGyGx", "GxGyGyGi"]
SHOTS = 4000
# Fixed small statistics: one inside the band, one just above it.
SMALL = [0.5, 3.0]


def stat(n, total, p):
    out = 0.0
    for c, q in ((n, p), (total - n, 1.0 - p)):
        if c:
            out += c * math.log(c / total / q)
    return 2.0 * out


def solve_p(n, total, target):
    # Statistic grows monotonically as p moves below f = n / total.
    lo, hi = 1e-9, n / total
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if stat(n, total, mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def main(path):
    rows = ["circuit_id,germ,L,outcome,count,model_prob,k"]
    for L, total in TOTALS.items():
        rest = total - sum(SMALL)
        weights = [1.0 + 0.25 * i for i in range(len(GERMS) - len(SMALL))]
        shares = SMALL + [rest * w / sum(weights) for w in weights]
        for i, (germ, share) in enumerate(zip(GERMS, shares)):
            n = 2600 + 150 * i
            p = solve_p(n, SHOTS, share)
            cid = f"L{L:02d}_{germ}"
            rows.append(f"{cid},{germ},{L},0,{n},{p!r},1")
            rows.append(f"{cid},{germ},{L},1,{SHOTS - n},{1.0 - p!r},1")
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(rows) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "configs/gst_fixture.csv")
