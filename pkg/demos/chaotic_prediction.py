# # Predicting chaotic recursions
#
# Two classic deterministic streams: the quadratic map (predict the next
# value from the two previous ones) and the three-variable convection
# flow (predict the first coordinate from the other two).  Everything is
# mapped onto [-1, 1] first, as the benchmark protocol does for bounded
# methods.  The second-order polynomial filter contains the quadratic map
# in its feature span, so it is the one to beat there; the adaptive tree
# gets close with purely piecewise-linear machinery and wins outright on
# the convection flow.

from pwltree import AdaptiveTreeRegressor, LinearFilter, VolterraFilter, generate
from pwltree.harness import normalize_stream, run_stream

for kind, n, mu in (("henon", 100_000, 0.05), ("lorenz", 100_000, 0.01)):
    stream = normalize_stream(generate(kind, n))
    x_ext, targets = stream.extended, stream.targets
    results = {}
    for name, lrn in (("adaptive tree", AdaptiveTreeRegressor(2, 2, mu=mu, s_plus=0.01)),
                      ("volterra", VolterraFilter(2, order=2, mu=mu)),
                      ("linear", LinearFilter(2, mu=mu))):
        results[name] = run_stream(lrn, x_ext, targets)
    print(f"{kind}: {n} steps, step size {mu}, data on [-1, 1]")
    for name, metrics in results.items():
        print(f"  {name:<14s} final normalized error {metrics.final_norm_err:.3e}   "
              f"last-10000 mean {metrics.e2[-10_000:].mean():.3e}")
    out = f"{kind}_errors.csv"
    with open(out, "w") as fh:
        fh.write("t," + ",".join(results) + "\n")
        norm = {k: m.norm_err for k, m in results.items()}
        for t in range(999, n, 1000):
            fh.write(f"{t + 1}," + ",".join(repr(float(norm[k][t])) for k in results) + "\n")
    print(f"  wrote error trajectories to {out}\n")
