#!/usr/bin/env python3
"""Regenerates include/desctrack/brief_pattern.hpp.

256 point pairs drawn from an isotropic Gaussian (sigma 6.5, seed 20160401),
rounded to integers and clipped radially to 13 px so that any rotation plus the
5x5 smoothing window stays inside a 31x31 patch. Pairs with identical points
are redrawn.
"""
import math
import numpy as np

SIGMA = 6.5
RADIUS = 13
SEED = 20160401


def draw_point(rng):
    x, y = rng.normal(0.0, SIGMA, size=2)
    r = math.hypot(x, y)
    if r > RADIUS:
        x, y = x * RADIUS / r, y * RADIUS / r
    x, y = int(round(x)), int(round(y))
    while x * x + y * y > RADIUS * RADIUS:
        x -= int(math.copysign(1, x)) if abs(x) >= abs(y) else 0
        y -= int(math.copysign(1, y)) if abs(y) > abs(x) else 0
    return x, y


def main():
    rng = np.random.default_rng(SEED)
    pairs = []
    while len(pairs) < 256:
        a, b = draw_point(rng), draw_point(rng)
        if a != b:
            pairs.append((a, b))
    lines = ["#pragma once", "", "// Generated by tools/gen_brief_pattern.py; do not edit.", "",
             "namespace desctrack {", "",
             "/// Test-point pairs {ax, ay, bx, by} of the steered binary descriptor.",
             "inline constexpr int kBriefPattern[256][4] = {"]
    for (a, b) in pairs:
        lines.append(f"    {{{a[0]}, {a[1]}, {b[0]}, {b[1]}}},")
    lines += ["};", "", "}  // namespace desctrack", ""]
    with open("include/desctrack/brief_pattern.hpp", "w") as f:
        f.write("\n".join(lines))


if __name__ == "__main__":
    main()
