#!/usr/bin/env python3
"""Sweep random lifetimes and report the worst-case factorization errors.

For each head length p the sweep draws random valid lifetimes, factors the
autocovariance generating function, and measures how well the ARMA side
reproduces the renewal side on the unit circle and lag by lag, along with the
agreement of the two routes to the scale constant.
"""

import argparse

import numpy as np

from renewal_arma import (
    acvf_renewal,
    arma_acvf,
    factorize,
    gen_eval_arma,
    gen_eval_renewal,
    make_constant_hazard,
    second_moment_limit,
    unit_circle_grid,
)
from renewal_arma.arma import theta_poly


def draw_spec(rng, p):
    while True:
        head = rng.uniform(0.2, 1.0, size=p)
        head *= rng.uniform(0.3, 0.85) / head.sum()
        if head[0] < 0.15:
            continue
        r = rng.uniform(0.2, 0.9)
        if abs((1 - r) * (1 - head.sum()) - head[-1] * r) < 1e-3:
            continue
        return make_constant_hazard(tuple(map(float, head)), float(r))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--per-p", type=int, default=100)
    ap.add_argument("--max-p", type=int, default=5)
    ap.add_argument("--M", type=int, default=5)
    ap.add_argument("--seed", type=int, default=20260811)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    grid = unit_circle_grid(64)
    print(f"{'p':>2} {'specs':>6} {'circle rel err':>15} {'acvf abs err':>13} "
          f"{'k rel err':>10} {'limit err':>10} {'orders':>10}")
    for p in range(1, args.max_p + 1):
        worst_id = worst_acvf = worst_k = worst_lim = 0.0
        orders = set()
        for _ in range(args.per_p):
            spec = draw_spec(rng, p)
            pgf, mu = spec.pgf(), spec.mean()
            model = factorize(pgf, args.M)
            orders.add((len(model.phi), len(model.theta)))
            for z in grid[::3]:
                ref = gen_eval_renewal(pgf, args.M, mu, z)
                worst_id = max(worst_id, abs(gen_eval_arma(model, z) - ref) / abs(ref))
            worst_acvf = max(worst_acvf, float(np.max(np.abs(
                arma_acvf(model, 50) - acvf_renewal(spec, args.M, 50)))))
            th = theta_poly(model)
            k2 = spec.variance() * pgf.den(1.0) ** 2 / (th(1.0) ** 2 * pgf.den.coeffs[0] ** 2)
            worst_k = max(worst_k, abs(model.k - k2) / abs(k2))
            worst_lim = max(worst_lim, abs(second_moment_limit(pgf) - spec.variance()))
        order_text = ",".join(f"({a},{b})" for a, b in sorted(orders))
        print(f"{p:>2} {args.per_p:>6} {worst_id:>15.3e} {worst_acvf:>13.3e} "
              f"{worst_k:>10.3e} {worst_lim:>10.3e} {order_text:>10}")


if __name__ == "__main__":
    main()
