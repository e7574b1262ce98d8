"""Independent reference computations for the frozen values in the C++ tests.

Run with `python3 tests/oracles/oracles.py`; every printed number is copied
verbatim into the corresponding test. Nothing here imports the C++ code.
"""

import math

import numpy as np

MASK = (1 << 64) - 1


class MT19937_64:
    n, m = 312, 156
    upper, lower = 0xFFFFFFFF80000000, 0x7FFFFFFF

    def __init__(self, seed):
        self.mt = [0] * self.n
        self.mt[0] = seed & MASK
        for i in range(1, self.n):
            prev = self.mt[i - 1]
            self.mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & MASK
        self.index = self.n

    def twist(self):
        for i in range(self.n):
            x = (self.mt[i] & self.upper) | (self.mt[(i + 1) % self.n] & self.lower)
            xa = x >> 1
            if x & 1:
                xa ^= 0xB5026F5AA96619E9
            self.mt[i] = self.mt[(i + self.m) % self.n] ^ xa
        self.index = 0

    def __call__(self):
        if self.index >= self.n:
            self.twist()
        y = self.mt[self.index]
        self.index += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & MASK


class Rng:
    def __init__(self, seed):
        self.engine = MT19937_64(seed)

    def below(self, bound):
        threshold = ((1 << 64) - bound) % bound
        while True:
            r = self.engine()
            if r >= threshold:
                return r % bound

    def uniform(self):
        return (self.engine() >> 11) * 2.0**-53


def mix_seed(seed, stream):
    z = (seed + 0x9E3779B97F4A7C15 * (stream + 1)) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def sample_without_replacement(n, k, rng):
    pool = list(range(n))
    for i in range(k):
        j = i + rng.below(n - i)
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]


def rng_section():
    print("== rng")
    g = MT19937_64(5489)
    for _ in range(9999):
        g()
    print("mt19937_64 default seed, 10000th:", g())
    r = Rng(42)
    print("Rng(42) next x3:", [r.engine() for _ in range(3)])
    r = Rng(42)
    print("Rng(42) below(10) x8:", [r.below(10) for _ in range(8)])
    r = Rng(42)
    print("Rng(42) uniform x3:", [repr(r.uniform()) for _ in range(3)])
    print("mix_seed(1,0):", mix_seed(1, 0), "mix_seed(0,5):", mix_seed(0, 5))
    print("sample_without_replacement(10,4,Rng(7)):", sample_without_replacement(10, 4, Rng(7)))


def dynamics_section():
    print("== dynamics fixture")
    fixture = {
        "q1": (0, [0.1, 0.5, 0.9, 0.7], [1, 0, 0, 0]),
        "q2": (1, [0.25, 0.25, 0.25, 0.25], [2, 2, 2, 2]),
        "q3": (2, [0.9, 0.95, 0.99, 0.999], [2, 2, 2, 2]),
    }
    for guid, (gold, p, preds) in fixture.items():
        a = np.array(p, dtype=np.float64)
        corr = sum(1 for x in preds if x == gold) / len(preds)
        print(guid, repr(float(a.mean())), repr(float(a.std(ddof=0))), corr)
    print("anchor variability sqrt(0.08/3):", repr(math.sqrt(0.08 / 3)))


SELECTION_TABLE = [
    # guid, confidence, variability
    ("a", 0.90, 0.05),
    ("b", 0.10, 0.05),
    ("c", 0.50, 0.40),
    ("d", 0.55, 0.40),
    ("e", 0.95, 0.02),
    ("f", 0.20, 0.10),
    ("g", 0.60, 0.30),
    ("h", 0.05, 0.01),
    ("i", 0.90, 0.05),
    ("j", 0.45, 0.35),
    ("k", 0.10, 0.02),
    ("l", 0.70, 0.20),
]


def count(f, n):
    return 0 if f == 0 else max(1, math.floor(f * n + 0.5))


def selection_section():
    print("== selection fixture (12 rows)")
    rows = SELECTION_TABLE
    k = count(0.33, len(rows))
    amb = sorted(rows, key=lambda r: (-r[2], -r[1], r[0]))[:k]
    easy = sorted(rows, key=lambda r: (-r[1], r[2], r[0]))[:k]
    hard = sorted(rows, key=lambda r: (r[1], r[2], r[0]))[:k]
    print("k:", k)
    print("ambiguous:", sorted(r[0] for r in amb))
    print("easy:", sorted(r[0] for r in easy))
    print("hard:", sorted(r[0] for r in hard))
    by_guid = sorted(r[0] for r in rows)
    picks = sample_without_replacement(len(rows), k, Rng(7))
    print("random seed 7:", sorted(by_guid[i] for i in picks))
    print("rank_hard_to_learn k=3:", [r[0] for r in sorted(rows, key=lambda r: (r[1], r[2], r[0]))[:3]])
    # classify: ambiguous first, then easy from the rest, then hard from the rest.
    remaining = [r for r in rows if r not in amb]
    easy_c = sorted(remaining, key=lambda r: (-r[1], r[2], r[0]))[:k]
    remaining = [r for r in remaining if r not in easy_c]
    hard_c = sorted(remaining, key=lambda r: (r[1], r[2], r[0]))[:k]
    print("classify easy:", sorted(r[0] for r in easy_c))
    print("classify hard:", sorted(r[0] for r in hard_c))


GD_TRAIN = [
    # features (dense, dim 4), gold
    ([1.0, 0.0, 0.5, 0.0], 0),
    ([0.9, 0.1, 0.0, 0.2], 0),
    ([0.0, 1.0, 0.3, 0.0], 1),
    ([0.2, 0.8, 0.0, 0.1], 1),
    ([0.0, 0.1, 0.0, 1.0], 2),
    ([0.3, 0.0, 0.2, 0.9], 2),
]


def gd_section():
    print("== full-batch gradient descent (C=3, D=4, lr=0.5, l2=0.01, 3 epochs)")
    x = np.array([f for f, _ in GD_TRAIN])
    y = np.array([g for _, g in GD_TRAIN])
    n, d = x.shape
    c = 3
    w = np.zeros((c, d))
    b = np.zeros(c)
    lr, l2 = 0.5, 0.01
    onehot = np.eye(c)[y]
    for epoch in range(3):
        z = x @ w.T + b
        z -= z.max(axis=1, keepdims=True)
        p = np.exp(z) / np.exp(z).sum(axis=1, keepdims=True)
        r = p - onehot
        gw = r.T @ x
        gb = r.sum(axis=0)
        w = (1 - lr * l2) * w - (lr / n) * gw
        b = b - (lr / n) * gb
        z = x @ w.T + b
        lse = np.log(np.exp(z - z.max(axis=1, keepdims=True)).sum(axis=1)) + z.max(axis=1)
        ce = float(np.mean(lse - z[np.arange(n), y]))
        loss = ce + 0.5 * l2 * float((w * w).sum())
        print("epoch", epoch + 1, "mean_train_loss", repr(loss))
    print("W:", [repr(float(v)) for v in w.ravel()])
    print("b:", [repr(float(v)) for v in b])


def report_section():
    print("== published-numbers replay")
    rows = {"pretrained": (31.69, 25.42), "100% train": (36.07, 30.50),
            "33% random": (33.38, 20.34), "33% ambiguous": (33.02, 22.03)}
    best = [max(v[i] for v in rows.values()) for i in range(2)]
    for name, vals in rows.items():
        print(name, ["**%.2f**" % v if v == best[i] else "%.2f" % v for i, v in enumerate(vals)])


if __name__ == "__main__":
    rng_section()
    dynamics_section()
    selection_section()
    gd_section()
    report_section()
