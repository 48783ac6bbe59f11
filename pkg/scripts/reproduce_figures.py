"""Write the six-panel figures of the general family (figure multipliers) and the steepest-descent family."""
import argparse
import os

from worstcase import hermite
from worstcase.generators import MAlphaConfig, gen_malpha, gen_sd
from worstcase.plotting import write_figure


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="figures")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--alpha", type=float, default=0.5)
    args = p.parse_args()
    os.makedirs(args.out, exist_ok=True)

    obj, gt = gen_malpha(MAlphaConfig(args.eps, args.alpha, lambda_rule="figure"))
    hermite.save(obj, os.path.join(args.out, "malpha_fn.json"))
    write_figure(obj, os.path.join(args.out, "malpha.svg"), eps=args.eps)
    print(f"general family: {gt.k_target} iterations, figure in {args.out}/malpha.svg")

    obj, gt = gen_sd(args.eps)
    hermite.save(obj, os.path.join(args.out, "sd_fn.json"))
    write_figure(obj, os.path.join(args.out, "sd.svg"), eps=args.eps)
    print(f"steepest-descent family: {gt.k_target} iterations, figure in {args.out}/sd.svg")


if __name__ == "__main__":
    main()
