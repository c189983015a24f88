"""Average sum rate versus RIS size for the two-stage designs and the no-RIS baseline."""
from bdris.evaluation import DEFAULT_STRATEGIES, run_sum_rate

from _common import base_parser, finish, n_list, scenario


def main():
    p = base_parser(__doc__, "results/fig2_sum_rate.csv")
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    res = run_sum_rate(scenario(args), DEFAULT_STRATEGIES["sum-rate"], n_list(args),
                       workers=args.workers)
    finish(res, args, "sum_rate", "sum rate [bit/s/Hz]")


if __name__ == "__main__":
    main()
