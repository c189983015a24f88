"""Wall-clock time of the passive and active stages versus RIS size.

Runs sequentially so timings are not perturbed by other trials. The optimal
relaxation scales as N^6 and is capped by --poo-max-n.
"""
import numpy as np

from bdris.evaluation import DEFAULT_STRATEGIES, run_timing

from _common import base_parser, finish, n_list, scenario


def main():
    p = base_parser(__doc__, "results/fig3_timing.csv")
    p.add_argument("--poo-max-n", type=int, default=32)
    args = p.parse_args()
    res = run_timing(scenario(args), DEFAULT_STRATEGIES["timing"], n_list(args),
                     poo_max_n=args.poo_max_n)
    finish(res, args, "passive_time_s", "passive-stage time [s]", logy=True)
    for strategy in dict.fromkeys(r.strategy for r in res.rows):
        series = res.series(strategy, "passive_time_s")
        if len(series) >= 2:
            Ns = np.array(list(series))
            slope = np.polyfit(np.log(Ns), np.log(list(series.values())), 1)[0]
            print(f"{strategy:>14}  passive log-log slope {slope:.2f}")


if __name__ == "__main__":
    main()
