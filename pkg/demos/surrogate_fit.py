# How much does the RBF surrogate know about the simulator?
import numpy as np
from scipy import stats

from batchopt import get_preset, random_init
from batchopt.plant import simulate_yield
from batchopt.surrogate import EvalArchive, fit

plant = get_preset("primary")
rng = np.random.default_rng(0)
train, test = EvalArchive(), EvalArchive()
for arc, n in ((train, 150), (test, 100)):
    while len(arc) < n:
        g = random_init(72, rng)
        arc.add(g, simulate_yield(plant, g, 72))

model = fit(train)
print("bandwidth", round(model.bandwidth, 3))
pred = model.predict(test.X())
print("held-out Spearman", round(stats.spearmanr(pred, test.y()).statistic, 3))
print("train residual max", np.abs(model.predict(train.X()) - train.y()).max())
