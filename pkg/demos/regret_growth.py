# # Regret against the best fixed mixture grows like log n
#
# The mixture weights follow a plain stochastic-gradient recursion.  With
# the decaying step schedule 2/(lambda t) -- lambda estimated as the
# smallest eigenvalue of the per-partition estimate second-moment matrix
# over a warm-up prefix -- the cumulative squared error should trail the
# best fixed weight vector in hindsight by at most O(log n).
#
# One structural subtlety dictates the setup: for any tree of depth >= 2
# the per-partition estimates are linearly dependent (the two-half and
# four-cell partitions sum to the same thing as the two mixed ones at
# every input), so the second-moment matrix is singular and no decaying
# schedule is well defined there.  Depth 1 with an axis split is the
# largest configuration where the strong-convexity premise can hold; the
# constituent node regressors train during warm-up and are then frozen so
# the recursion faces a fixed feature stream.

import numpy as np

from pwltree import DirectMixtureRegressor, batch_best_weights, empirical_strong_convexity, generate

warmup, n_max = 1000, 100_000
checkpoints = (1000, 10_000, 100_000)
axis = np.array([[0.0, -1.0, 0.0]])

table = {n: [] for n in checkpoints}
for seed in range(11, 16):
    stream = generate("matched", n_max + warmup, seed=seed)
    x_ext, targets = stream.extended, stream.targets

    learner = DirectMixtureRegressor(1, 2, mode="hard", mu=0.01, boundaries=axis)
    warm_feats = np.empty((warmup, 2))
    for t in range(warmup):
        pred = learner.predict(x_ext[t])
        warm_feats[t] = pred.model_estimates
        learner.update(x_ext[t], targets[t], pred)
    lam = empirical_strong_convexity(warm_feats[warmup // 2:])

    w = learner.w_vec.copy()
    feats = np.empty((n_max, 2))
    e2 = np.empty(n_max)
    tail = targets[warmup:]
    for t in range(n_max):
        d_vec = learner.predict(x_ext[warmup + t]).model_estimates
        feats[t] = d_vec
        e = tail[t] - float(w @ d_vec)
        e2[t] = e * e
        w += (2.0 / (lam * (t + 1))) * e * d_vec

    for n in checkpoints:
        w_star = batch_best_weights(feats[:n], tail[:n])
        best = float(np.sum((tail[:n] - feats[:n] @ w_star) ** 2))
        table[n].append(float(np.sum(e2[:n])) - best)

print("regret R_n against the hindsight-optimal fixed mixture, per seed:")
print("       n   " + "".join(f"  seed {s:<10d}" for s in range(11, 16)))
for n in checkpoints:
    print(f"  {n:>8d} " + "".join(f"  {r:<14.2f}" for r in table[n]))
print("\nnormalized by the log-growth envelope, averaged over seeds:")
for n in checkpoints:
    mean_r = np.mean(table[n])
    print(f"  R(n={n}) / (1 + ln n) = {mean_r / (1 + np.log(n)):.2f}")
print("\nThe early steps of the 2/(lambda t) schedule are aggressive, so a few seeds")
print("pay a large one-off transient; what matters is that R_n barely moves between")
print("n = 1e3 and n = 1e5.  A linear-regret learner would grow ~10x per decade.")
