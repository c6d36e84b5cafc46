# # When the tree is too deep or too shallow
#
# Real data never announces the right tree depth.  Two stress streams:
# one generated by a single split (a depth-2 tree overfits it) and one by
# three nested splits (a depth-2 tree underfits it).  Because the
# adaptive learner can move its boundaries, it makes the most of whatever
# depth it has in both directions, while the fixed tree pays for every
# mismatch between its frozen quadrants and the generator.

from pwltree import AdaptiveTreeRegressor, FixedTreeRegressor, generate
from pwltree.harness import average_metrics, run_stream

n = 30_000
trials = 5

for kind, story in (("first_order", "depth-2 tree on a one-split generator (overfit)"),
                    ("third_order", "depth-2 tree on a three-level generator (underfit)")):
    adaptive_runs, fixed_runs = [], []
    for trial in range(trials):
        stream = generate(kind, n, seed=500 + trial)
        adaptive_runs.append(run_stream(AdaptiveTreeRegressor(2, 2, mu=0.005, s_plus=0.01),
                                        stream.extended, stream.targets))
        fixed_runs.append(run_stream(FixedTreeRegressor(2, 2, mu=0.005),
                                     stream.extended, stream.targets))
    adaptive = average_metrics(adaptive_runs)
    fixed = average_metrics(fixed_runs)
    print(story)
    print(f"  final normalized error over {trials} trials: "
          f"adaptive {adaptive.final_norm_err:.4f}, fixed {fixed.final_norm_err:.4f}")
    print(f"  converged level (last-3000 mean): "
          f"adaptive {adaptive.e2[-3000:].mean():.4f}, fixed {fixed.e2[-3000:].mean():.4f}\n")
