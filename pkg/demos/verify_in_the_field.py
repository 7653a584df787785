"""Run the oracle agreement suite programmatically.

The library ships its brute-force validators (convolution Gram, frequency-
side Gram, sampled Gram-Schmidt) so correctness can be re-checked on any
install.  This demo calls one of each directly; `fracsparse verify` runs the
full battery.

Run:  python3 demos/verify_in_the_field.py
"""

from fracsparse import (
    GramContext,
    HalfSpacePoint,
    KernelFamily,
    OracleGrid,
    convolution_gram_oracle,
    gram,
    plancherel_gram_oracle,
)


def main():
    q = HalfSpacePoint(0.5, -1.0)
    p = HalfSpacePoint(1.5, 2.0)

    alpha = 0.5
    ctx = GramContext(KernelFamily.heat(alpha))
    ref = convolution_gram_oracle(alpha, q, p, OracleGrid(spacing=10.0, extent=3000.0))
    got = gram(ctx, q, p)
    print(f"heat alpha={alpha}: semigroup {got:.12e} vs convolution {ref:.12e}")

    sigma = 1.0
    ctx = GramContext(KernelFamily.poisson(sigma))
    ref = plancherel_gram_oracle(sigma, q, p)
    got = gram(ctx, q, p)
    print(f"poisson sigma={sigma}: spatial {got:.12e} vs frequency-side {ref:.12e}")


if __name__ == "__main__":
    main()
