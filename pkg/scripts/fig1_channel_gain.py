"""Average sum channel gain versus RIS size for each architecture and relaxation."""
from bdris.evaluation import DEFAULT_STRATEGIES, run_channel_gain

from _common import base_parser, finish, n_list, scenario


def main():
    p = base_parser(__doc__, "results/fig1_channel_gain.csv")
    p.add_argument("--poo-max-n", type=int, default=32)
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    res = run_channel_gain(scenario(args), DEFAULT_STRATEGIES["channel-gain"], n_list(args),
                           poo_max_n=args.poo_max_n, workers=args.workers)
    finish(res, args, "sum_channel_gain", "sum channel gain", logy=True)


if __name__ == "__main__":
    main()
