"""Print p_d(n) and p_d(<=n), the number of order ideals with n terms."""
import argparse
import time

from numfan.terms import count_order_ideals


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-d", "--dim", type=int, default=4)
    ap.add_argument("--from", dest="lo", type=int, default=8)
    ap.add_argument("--to", dest="hi", type=int, default=17)
    args = ap.parse_args()
    print(f"{'n':>3} | {'p_d(n)':>10} | {'p_d(<=n)':>10} | {'sec':>6}")
    total = count_order_ideals(args.dim, args.lo - 1, cumulative=True) if args.lo > 1 else 0
    for n in range(args.lo, args.hi + 1):
        start = time.perf_counter()
        c = count_order_ideals(args.dim, n)
        total += c
        print(f"{n:>3} | {c:>10} | {total:>10} | {time.perf_counter() - start:>6.2f}")


if __name__ == "__main__":
    main()
