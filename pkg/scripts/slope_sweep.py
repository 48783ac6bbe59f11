"""Run every matching method over an eps grid and fit log(count) against log(1/eps)."""
import argparse
import csv
import sys
from concurrent.futures import ThreadPoolExecutor

from worstcase.analysis import MATCHING, fit_complexity_slope, verify_lower_bound_run
from worstcase.generators import rate

FAMILY_ALPHA = {"newton2d": (0.0,), "sd": (0.0,), "crs": (1.0,)}


def cells(eps, alphas):
    for family, methods in MATCHING.items():
        for method in methods:
            for a in FAMILY_ALPHA.get(family, alphas):
                if method == "gqt" and a == 0.0:
                    continue
                if method == "royer_wright" and a != 1.0:
                    continue
                yield family, method, a


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--eps", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.02])
    p.add_argument("--alpha", type=float, nargs="+", default=[0.0, 0.5, 1.0])
    p.add_argument("--csv", default="slopes.csv")
    args = p.parse_args()
    jobs = sorted(cells(args.eps, args.alpha))
    with ThreadPoolExecutor() as pool:
        futs = {(f, m, a, e): pool.submit(verify_lower_bound_run, f, m, e, a)
                for f, m, a in jobs for e in args.eps}
        reps = {k: v.result() for k, v in futs.items()}
    rows, ok = [], True
    for f, m, a in jobs:
        fit = fit_complexity_slope([(e, reps[(f, m, a, e)].count) for e in args.eps], a)
        exact = all(reps[(f, m, a, e)].passed for e in args.eps)
        ok = ok and exact and abs(fit.slope - rate(a)) <= 0.1
        rows.append([f, m, a, fit.slope, rate(a), fit.max_ratio, exact])
        print(f"{f:9s} {m:13s} alpha={a:<4} slope {fit.slope:.4f} (predicted {rate(a):.4f}) "
              f"max count/prediction {fit.max_ratio:.6g} exact={exact}")
    with open(args.csv, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["family", "method", "alpha", "slope", "predicted_slope", "max_ratio", "exact"])
        w.writerows(rows)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
