"""Acceptance gate: every headline requirement as one test with a printed
pass/fail line (collected into the terminal summary by conftest.py).

Everything runs at desk scale: fixed reference rows, independent oracles,
and small synthetic training problems instead of large external datasets.
"""

import json
import math
import time

import numpy as np
import pytest

from woamlp import (
    ConfusionMatrix,
    ConvLayerSpec,
    FeatureTable,
    MlpTopology,
    TrainConfig,
    WoaConfig,
    cnn_layer_forward,
    fitness,
    flatten,
    metrics_report,
    optimize,
    param_count,
    predict_many,
    rastrigin,
    rosenbrock,
    save_feature_table,
    sphere,
    train,
    unflatten,
)
from woamlp.cli import main

RESULTS = []


def announce(criterion, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}  {criterion}"
    if detail:
        line += f"  [{detail}]"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_c1_metric_reproduction():
    t0 = time.time()
    row_a = metrics_report(ConfusionMatrix(255, 58, 16, 291, "pos"))
    want_a = {"acc": 88.06, "sen": 81.47, "spe": 94.79, "pre": 94.10,
              "f1": 87.33, "mcc": 76.87, "kappa": 76.16}
    ok = all(abs(100.0 * getattr(row_a, k) - v) < 0.005
             for k, v in want_a.items())

    row_b = metrics_report(ConfusionMatrix(216, 97, 0, 307, "pos"))
    ok = ok and row_b.spe == 1.0 and row_b.pre == 1.0
    want_b = {"acc": 84.35, "sen": 69.01, "f1": 81.66,
              "mcc": 72.42, "kappa": 68.80}
    ok = ok and all(abs(100.0 * getattr(row_b, k) - v) < 0.005
                    for k, v in want_b.items())
    announce("criterion 1: reference metric rows reproduced within 0.005pp",
             ok, f"{time.time() - t0:.3f}s")


def test_c2_metric_oracle_equivalence():
    t0 = time.time()

    def straight(tp, fn, fp, tn):
        total = tp + fn + fp + tn
        acc = (tp + tn) / total
        sen = tp / (tp + fn) if tp + fn else 0.0
        spe = tn / (tn + fp) if tn + fp else 0.0
        pre = tp / (tp + fp) if tp + fp else 0.0
        f1 = 2 * pre * sen / (pre + sen) if pre + sen else 0.0
        under = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
        mcc = (tp * tn - fp * fn) / math.sqrt(under) if under else 0.0
        ra = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / total**2
        kappa = (acc - ra) / (1 - ra) if ra != 1 else 0.0
        return (acc, sen, spe, pre, f1, mcc, kappa)

    rng = np.random.default_rng(1001)
    # force the zero-denominator corners in, then fill with random draws
    cases = [(0, 0, 3, 5), (4, 2, 0, 0), (0, 3, 0, 5), (0, 0, 0, 7),
             (5, 0, 0, 0), (0, 4, 0, 0)]
    while len(cases) < 1000:
        tp, fn, fp, tn = (int(v) for v in rng.integers(0, 80, size=4))
        if tp + fn + fp + tn > 0:
            cases.append((tp, fn, fp, tn))

    worst = 0.0
    for tp, fn, fp, tn in cases:
        report = metrics_report(ConfusionMatrix(tp, fn, fp, tn, "p"))
        got = (report.acc, report.sen, report.spe, report.pre,
               report.f1, report.mcc, report.kappa)
        for g, w in zip(got, straight(tp, fn, fp, tn)):
            worst = max(worst, abs(g - w))
    elapsed = time.time() - t0
    announce("criterion 2: 1000-matrix oracle equivalence within 1e-12",
             worst < 1e-12 and elapsed < 1.0,
             f"worst {worst:.2e}, {elapsed:.2f}s")


class ForcedEncircleRng:
    """Forces r = 0.5 (A = 0) and p = 0 so every move is the encircling
    update straight onto the incumbent best."""

    def __init__(self, seed=0):
        self.inner = np.random.default_rng(seed)

    def uniform(self, low=0.0, high=1.0, size=None):
        if size is not None:
            return self.inner.uniform(low, high, size)
        return 0.0

    def random(self, size=None):
        if size is None:
            return 0.0
        return np.full(size, 0.5)

    def integers(self, *args, **kwargs):
        return self.inner.integers(*args, **kwargs)


def test_c3_woa_correctness_suite():
    t0 = time.time()
    objectives = (sphere, rosenbrock, rastrigin)
    out_of_box = 0
    monotone = True

    for seed in range(100):
        for objective in objectives:
            config = WoaConfig(population_size=10, max_iterations=30,
                               dimension=4, lower_bound=-5.0,
                               upper_bound=5.0, seed=seed)
            low, high = config.lower_bound, config.upper_bound

            def fenced(x):
                nonlocal out_of_box
                if (x < low).any() or (x > high).any():
                    out_of_box += 1
                return objective(x)

            state = optimize(fenced, config)
            if any(b > a for a, b in zip(state.history, state.history[1:])):
                monotone = False

    collapse_config = WoaConfig(population_size=8, max_iterations=1,
                                dimension=3, lower_bound=-5.0,
                                upper_bound=5.0, seed=0)
    collapsed = optimize(sphere, collapse_config, rng=ForcedEncircleRng(3))
    collapse_ok = all((row == collapsed.best_position).all()
                      for row in collapsed.positions)

    det_config = WoaConfig(population_size=12, max_iterations=40, dimension=5,
                           lower_bound=-10.0, upper_bound=10.0, seed=21)
    runs = [optimize(rastrigin, det_config),
            optimize(rastrigin, det_config),
            optimize(rastrigin, det_config, workers=4)]
    determinism_ok = all(
        runs[0].history == other.history
        and (runs[0].best_position == other.best_position).all()
        for other in runs[1:]
    )

    elapsed = time.time() - t0
    announce(
        "criterion 3: WOA elitism/boundedness/collapse/determinism suite",
        monotone and out_of_box == 0 and collapse_ok and determinism_ok
        and elapsed < 30.0,
        f"300 runs, {elapsed:.1f}s",
    )


def test_c4_woa_efficacy_on_sphere():
    t0 = time.time()
    wins = 0
    for seed in range(20):
        config = WoaConfig(population_size=30, max_iterations=200, dimension=5,
                           lower_bound=-10.0, upper_bound=10.0, seed=seed)
        if optimize(sphere, config).best_fitness < 1e-2:
            wins += 1
    elapsed = time.time() - t0
    announce("criterion 4: sphere d=5 reaches <1e-2 on >=18/20 seeds",
             wins >= 18 and elapsed < 10.0, f"{wins}/20, {elapsed:.1f}s")


def test_c5_woa_mlp_training():
    t0 = time.time()
    xor = FeatureTable(
        sample_ids=["x00", "x01", "x10", "x11"],
        features=np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]),
        labels=["a", "b", "b", "a"],
        class_names=["a", "b"],
    )
    xor_wins = 0
    for seed in range(20):
        config = TrainConfig.create(MlpTopology((2, 4, 2)), population_size=40,
                                    max_iterations=500, weight_bound=10.0,
                                    seed=seed, normalize=False)
        model = train(config, xor)
        labels, _ = predict_many(model, xor.features)
        if labels == xor.labels:
            xor_wins += 1

    rng = np.random.default_rng(0)
    points = np.vstack([rng.normal(-2.0, 0.5, size=(10, 2)),
                        rng.normal(2.0, 0.5, size=(10, 2))])
    separable = FeatureTable(
        sample_ids=[f"p{i:02d}" for i in range(20)],
        features=points,
        labels=["lo"] * 10 + ["hi"] * 10,
        class_names=["hi", "lo"],
    )
    sep_wins = 0
    for seed in range(20):
        config = TrainConfig.create(MlpTopology((2, 4, 2)), population_size=40,
                                    max_iterations=500, weight_bound=10.0,
                                    seed=seed, normalize=False)
        model = train(config, separable)
        labels, _ = predict_many(model, separable.features)
        if labels == separable.labels:
            sep_wins += 1

    elapsed = time.time() - t0
    announce(
        "criterion 5: XOR >=16/20 seeds perfect, separable set 20/20",
        xor_wins >= 16 and sep_wins == 20 and elapsed < 60.0,
        f"xor {xor_wins}/20, separable {sep_wins}/20, {elapsed:.1f}s",
    )


def test_c6_fitness_oracle_and_round_trips():
    t0 = time.time()
    rng = np.random.default_rng(55)

    def loop_fitness(params, topology, table):
        layers = unflatten(topology, params)
        index = {name: k for k, name in enumerate(table.class_names)}
        total, count = 0.0, 0
        for row, label in zip(table.features, table.labels):
            h = [float(v) for v in row]
            for depth, (w, b) in enumerate(layers):
                z = [sum(w[j][i] * h[i] for i in range(len(h))) + b[j]
                     for j in range(w.shape[0])]
                if depth < len(layers) - 1:
                    h = [1.0 / (1.0 + math.exp(-v)) if v >= 0
                         else math.exp(v) / (1.0 + math.exp(v)) for v in z]
                else:
                    m = max(z)
                    e = [math.exp(v - m) for v in z]
                    s = sum(e)
                    h = [v / s for v in e]
            for k, prob in enumerate(h):
                total += (prob - (1.0 if index[label] == k else 0.0)) ** 2
                count += 1
        return total / count

    worst = 0.0
    for _ in range(25):
        d = int(rng.integers(1, 6))
        c = int(rng.integers(2, 4))
        hidden = [int(v) for v in rng.integers(1, 7, size=rng.integers(0, 3))]
        topology = MlpTopology((d, *hidden, c))
        n = int(rng.integers(2, 12))
        names = [f"k{j}" for j in range(c)]
        table = FeatureTable(
            sample_ids=[f"s{i}" for i in range(n)],
            features=rng.normal(size=(n, d)),
            labels=[names[int(v)] for v in rng.integers(c, size=n)],
            class_names=names,
        )
        params = rng.normal(size=param_count(topology))
        worst = max(worst, abs(fitness(params, topology, table)
                               - loop_fitness(params, topology, table)))

    round_trips_exact = True
    for _ in range(100):
        sizes = tuple(int(v) for v in rng.integers(1, 12, size=rng.integers(2, 6)))
        topology = MlpTopology(sizes)
        params = rng.normal(size=param_count(topology))
        if not (flatten(unflatten(topology, params)) == params).all():
            round_trips_exact = False

    elapsed = time.time() - t0
    announce(
        "criterion 6: MSE fitness oracle 1e-12, 100 flatten round-trips exact",
        worst < 1e-12 and round_trips_exact,
        f"worst {worst:.2e}, {elapsed:.1f}s",
    )


def test_c7_conv_reference_layer():
    t0 = time.time()
    rng = np.random.default_rng(77)

    def brute(image, kernel, bias, n, kind):
        kh, kw = kernel.shape
        h, w = image.shape
        conv = np.empty((h - kh + 1, w - kw + 1))
        for i in range(h - kh + 1):
            for j in range(w - kw + 1):
                acc = 0.0
                for a in range(kh):
                    for b in range(kw):
                        acc += image[i + a, j + b] * kernel[a, b]
                conv[i, j] = max(acc + bias, 0.0)
        ph, pw = conv.shape[0] // n, conv.shape[1] // n
        out = np.empty((ph, pw))
        for i in range(ph):
            for j in range(pw):
                block = conv[i * n:(i + 1) * n, j * n:(j + 1) * n]
                out[i, j] = {"max": block.max, "average": block.mean,
                             "sum": block.sum}[kind]()
        return out

    exact = True
    for _ in range(50):
        h, w = (int(v) for v in rng.integers(4, 14, size=2))
        kh = int(rng.integers(1, min(4, h) + 1))
        kw = int(rng.integers(1, min(4, w) + 1))
        image = rng.integers(-6, 7, size=(h, w)).astype(float)
        kernel = rng.integers(-3, 4, size=(kh, kw)).astype(float)
        bias = float(rng.integers(-3, 4))
        n = int(rng.integers(1, min(h - kh + 1, w - kw + 1) + 1))
        kind = ("max", "average", "sum")[int(rng.integers(3))]
        spec = ConvLayerSpec(kernel=kernel, bias=bias, pool_window=n,
                             pool_kind=kind)
        got = cnn_layer_forward(image, spec)
        want = brute(image, kernel, bias, n, kind)
        if got.shape != want.shape or not (got == want).all():
            exact = False

    announce("criterion 7: conv layer matches brute-force oracle exactly",
             exact, f"50 settings, {time.time() - t0:.1f}s")


def test_c8_end_to_end_pipeline(tmp_path):
    t0 = time.time()
    rng = np.random.default_rng(2024)
    n = 100  # per class; 200 samples total
    ids = [f"s{i:03d}" for i in range(2 * n)]
    labels = ["neg"] * n + ["pos"] * n
    feats_a = np.vstack([rng.normal(-1.0, 0.6, size=(n, 2)),
                         rng.normal(1.0, 0.6, size=(n, 2))])
    feats_b = np.vstack([rng.normal(0.5, 0.5, size=(n, 2)),
                         rng.normal(-0.5, 0.5, size=(n, 2))])
    save_feature_table(FeatureTable(ids, feats_a, labels, ["neg", "pos"]),
                       tmp_path / "a.csv")
    save_feature_table(FeatureTable(ids, feats_b, labels, ["neg", "pos"]),
                       tmp_path / "b.csv")

    ok_fuse = main(["fuse", str(tmp_path / "a.csv"), str(tmp_path / "b.csv"),
                    "-o", str(tmp_path / "fused.csv")]) == 0
    ok_train = main(["train", "--data", str(tmp_path / "fused.csv"),
                     "-o", str(tmp_path / "model.json"),
                     "--hidden-layers", "6", "--population-size", "20",
                     "--max-iterations", "60", "--seed", "3"]) == 0
    ok_eval = main(["eval", "--model", str(tmp_path / "model.json"),
                    "--data", str(tmp_path / "model_holdout.csv"),
                    "-o", str(tmp_path / "metrics.json"),
                    "--positive-class", "pos"]) == 0

    accuracy = json.loads((tmp_path / "metrics.json").read_text())["acc"]

    ok_rerun = main(["train", "--data", str(tmp_path / "fused.csv"),
                     "-o", str(tmp_path / "again.json"),
                     "--config", str(tmp_path / "model_config.json")]) == 0
    identical = all(
        (tmp_path / f"model{suffix}").read_bytes()
        == (tmp_path / f"again{suffix}").read_bytes()
        for suffix in (".json", "_history.csv", "_config.json", "_holdout.csv")
    )
    figures = all((tmp_path / name).exists()
                  for name in ("model_history.png", "metrics.png"))

    elapsed = time.time() - t0
    announce(
        "criterion 8: fuse->train->eval reaches acc>=0.9, echo reproducible",
        ok_fuse and ok_train and ok_eval and accuracy >= 0.9
        and ok_rerun and identical and figures and elapsed < 60.0,
        f"acc {accuracy:.3f}, {elapsed:.1f}s",
    )
