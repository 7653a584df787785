"""Sparse expansion for the fractional-Laplacian extension problem.

The second reference experiment: modulated Gaussian bumps decomposed over
the fractional Poisson kernel dictionary at sigma = 1.  Unlike the heat
family, these kernels have no closed-form Gram shortcut away from sigma = 1,
so Gram entries come from adaptive product integrals (memoized inside the
context).  A short 8-term run keeps the demo quick; pass a larger count on
the command line for the full 15-term experiment.

Run:  python3 demos/extension_problem.py [terms]
"""

import sys

from fracsparse import (
    GramContext,
    KernelFamily,
    decompose,
    example2,
    example2_search,
)


def main():
    terms = int(sys.argv[1]) if len(sys.argv) > 1 else 8
    f = example2()
    ctx = GramContext(KernelFamily.poisson(1.0))
    print(f"datum L2 norm: {f.norm:.6f}; expanding into {terms} atoms")

    rep = decompose(f, ctx, example2_search(), max_terms=terms)

    print(f"\n{'k':>3} {'t_k':>10} {'x_k':>10} {'c_k':>12} {'rel err':>12}")
    for k in range(len(rep)):
        q = rep.params[k]
        print(
            f"{k + 1:>3} {q.t:>10.4f} {q.x:>10.4f} "
            f"{rep.kernel_coeffs[k]:>12.4f} "
            f"{rep.residual_norms[k] / rep.data_norm:>12.4e}"
        )


if __name__ == "__main__":
    main()
