#!/usr/bin/env python3
"""Build LIBSVM-format copies of public benchmark datasets.

The LIBSVM dataset site is not always reachable (offline CI, sandboxes), but
several of the same public UCI/StatLib datasets are redistributed inside
PyPI packages.  This script downloads those wheels with pip, extracts the
raw tables and writes them in LIBSVM text format under ``data/``:

    heart, diabetes, ionosphere, sonar, breast-cancer   (classification)
    housing, mpg, abalone                               (regression)
    a9a, a9a.t   Adult census data binarized to 121 indicator features (123 on the LIBSVM site)
    mackey-glass17   regenerated Mackey-Glass (tau = 17) lag-embedding set

For every dataset a ``<name>_scale`` twin is also written, with each feature
mapped linearly onto [-1, 1] the way ``svm-scale`` does it (zero entries
omitted, ``%g`` formatting).

Differences from the files on the LIBSVM site are unavoidable and listed in
``data/README.md``.  If you have the original files, drop them into ``data/``
(or point ``SSN_DATA_DIR`` at them) and they are used instead.

Usage: python3 tools/fetch_datasets.py [--out data] [--cache /tmp/ssn-wheels]
"""

import argparse
import gzip
import io
import os
import subprocess
import sys
import zipfile

import numpy as np

WHEELS = {
    "keel": "keel-ds==0.2.5",
    "mlxtend": "mlxtend==0.24.0",
    "sklego": "scikit-lego==0.9.10",
    "responsibly": "responsibly==0.1.2",
}


def fetch(cache, key):
    spec = WHEELS[key]
    name = spec.split("==")[0].replace("-", "_").lower()
    for f in os.listdir(cache) if os.path.isdir(cache) else []:
        if f.lower().replace("-", "_").startswith(name):
            return os.path.join(cache, f)
    subprocess.check_call([sys.executable, "-m", "pip", "download", "--no-deps",
                           "-q", "-d", cache, spec])
    return fetch(cache, key)


def fmt(v):
    return "%d" % v if float(v).is_integer() and abs(v) < 1e15 else repr(float(v))


def write_libsvm(path, y, rows):
    """rows: list of lists of (1-based index, value); zeros are skipped."""
    with open(path, "w") as f:
        for label, row in zip(y, rows):
            parts = [fmt(label)] + ["%d:%s" % (j, fmt(v)) for j, v in row if v != 0.0]
            f.write(" ".join(parts) + "\n")


def dense_rows(x, skip=()):
    rows = []
    for r in x:
        row, j = [], 1
        for v in r:
            while j in skip:
                j += 1
            row.append((j, float(v)))
            j += 1
        rows.append(row)
    return rows


def scale_rows(rows):
    """svm-scale with default [-1, 1] bounds; absent entries count as 0."""
    n = len(rows)
    lo, hi, seen = {}, {}, {}
    for row in rows:
        for j, v in row:
            lo[j] = min(lo.get(j, v), v)
            hi[j] = max(hi.get(j, v), v)
            seen[j] = seen.get(j, 0) + 1
    for j, c in seen.items():
        if c < n:
            lo[j], hi[j] = min(lo[j], 0.0), max(hi[j], 0.0)
    out = []
    for row in rows:
        present = dict(row)
        srow = []
        for j in sorted(lo):
            if lo[j] == hi[j]:
                continue
            v = present.get(j, 0.0)
            srow.append((j, float("%g" % (-1.0 + 2.0 * (v - lo[j]) / (hi[j] - lo[j])))))
        out.append(srow)
    return out


def emit(out, name, y, rows):
    write_libsvm(os.path.join(out, name), y, rows)
    write_libsvm(os.path.join(out, name + "_scale"), y, scale_rows(rows))
    print("wrote %-16s l=%d" % (name, len(y)))


def keel_table(whl, name):
    z = zipfile.ZipFile(whl)
    for sub in ("balanced", "imbalanced"):
        p = "keel_ds/data/%s/raw/%s.dat" % (sub, name)
        if p in z.namelist():
            lines = z.read(p).decode().splitlines()
            return [[t.strip() for t in l.split(",")] for l in lines
                    if l.strip() and not l.startswith("@")]
    raise KeyError(name)


def build_keel(out, whl):
    # Statlog heart: class 2 (presence) -> +1.  KEEL stores oldpeak (column
    # 10) without its decimal point; every value has one decimal digit.
    t = keel_table(whl, "heart")
    x = np.array([[float(v) for v in r[:-1]] for r in t])
    x[:, 9] /= 10.0
    y = [1 if r[-1] == "2" else -1 for r in t]
    emit(out, "heart", y, dense_rows(x))

    # Pima Indians diabetes: tested_positive -> -1 as in the LIBSVM copy.
    t = keel_table(whl, "pima")
    x = np.array([[float(v) for v in r[:-1]] for r in t])
    y = [-1 if r[-1] == "tested_positive" else 1 for r in t]
    emit(out, "diabetes", y, dense_rows(x))

    # Ionosphere: KEEL drops the all-zero second attribute; keep indices
    # aligned with the 34-feature original by skipping index 2.
    t = keel_table(whl, "ionosphere")
    x = np.array([[float(v) for v in r[:-1]] for r in t])
    y = [1 if r[-1] == "g" else -1 for r in t]
    emit(out, "ionosphere", y, dense_rows(x, skip={2}))

    t = keel_table(whl, "sonar")
    x = np.array([[float(v) for v in r[:-1]] for r in t])
    y = [1 if r[-1] == "R" else -1 for r in t]
    emit(out, "sonar", y, dense_rows(x))

    # Wisconsin breast cancer (original), labels 2/4 kept raw.
    t = keel_table(whl, "wisconsin")
    x = np.array([[float(v) for v in r[:-1]] for r in t])
    y = [2 if r[-1] == "2" else 4 for r in t]
    emit(out, "breast-cancer", y, dense_rows(x))


def build_mlxtend(out, whl):
    z = zipfile.ZipFile(whl)
    raw = z.read("mlxtend/data/data/boston_housing.csv").decode().splitlines()
    m = np.array([[float(v) for v in l.split(",")] for l in raw if l.strip()])
    emit(out, "housing", list(m[:, -1]), dense_rows(m[:, :-1]))

    raw = gzip.decompress(z.read("mlxtend/data/data/autompg.csv.gz")).decode()
    rows, y = [], []
    for l in raw.splitlines():
        p = l.split(",")
        if len(p) < 9:
            continue
        rows.append([float(v) for v in p[:7]])
        y.append(float(p[8]))
    emit(out, "mpg", y, dense_rows(np.array(rows)))


def build_abalone(out, whl):
    z = zipfile.ZipFile(whl)
    inner = zipfile.ZipFile(io.BytesIO(z.read("sklego/data/abalone.zip")))
    raw = inner.read(inner.namelist()[0]).decode().splitlines()[1:]
    sex = {"M": 1.0, "F": 2.0, "I": 3.0}
    rows, y = [], []
    for l in raw:
        p = l.split(",")
        if len(p) < 9:
            continue
        rows.append([sex[p[0]]] + [float(v) for v in p[1:8]])
        y.append(float(p[8]))
    emit(out, "abalone", y, dense_rows(np.array(rows)))


ADULT_CONT = {0: 5, 2: 5, 4: 5, 10: 2, 11: 2, 12: 5}


def build_adult(out, whl):
    z = zipfile.ZipFile(whl)

    def load(p):
        recs = []
        for l in z.read(p).decode().splitlines():
            f = [t.strip() for t in l.split(",")]
            if len(f) == 15:
                recs.append(f)
        return recs

    train = load("responsibly/dataset/adult/adult.data")
    test = load("responsibly/dataset/adult/adult.test")

    # Feature layout: each continuous attribute is cut into quantile bins
    # (capital gain/loss into zero / nonzero); each categorical attribute
    # is one-hot.  Missing values ('?') contribute no feature.
    layout, next_index = [], 1
    for a in range(14):
        if a in ADULT_CONT:
            bins = ADULT_CONT[a]
            vals = np.array([float(r[a]) for r in train])
            if bins == 2:
                edges = [0.0]
            else:
                edges = list(np.unique(np.quantile(vals, np.linspace(0, 1, bins + 1)[1:-1])))
            layout.append(("cont", edges, next_index))
            next_index += len(edges) + 1
        else:
            cats = sorted({r[a] for r in train + test if r[a] != "?"})
            layout.append(("cat", {c: next_index + i for i, c in enumerate(cats)}, next_index))
            next_index += len(cats)

    def encode(recs):
        y, rows = [], []
        for r in recs:
            row = []
            for a, (kind, spec, base) in enumerate(layout):
                if r[a] == "?":
                    continue
                if kind == "cont":
                    v = float(r[a])
                    row.append((base + int(np.searchsorted(spec, v, side="right")), 1.0))
                else:
                    row.append((spec[r[a]], 1.0))
            rows.append(sorted(row))
            y.append(1 if r[14].startswith(">50K") else -1)
        return y, rows

    y, rows = encode(train)
    write_libsvm(os.path.join(out, "a9a"), y, rows)
    print("wrote %-16s l=%d n=%d" % ("a9a", len(y), next_index - 1))
    y, rows = encode(test)
    write_libsvm(os.path.join(out, "a9a.t"), y, rows)
    print("wrote %-16s l=%d" % ("a9a.t", len(y)))


def build_mackey_glass(out):
    # dx/dt = 0.2 x(t-17) / (1 + x(t-17)^10) - 0.1 x(t), RK4 with h = 0.1,
    # constant history 1.2, sampled at integer times after a 1000-unit burn-in.
    tau, h = 17.0, 0.1
    lag = int(round(tau / h))
    steps = int((1000 + 1500) / h)
    x = np.empty(steps + lag + 1)
    x[: lag + 1] = 1.2

    def f(xt, xlag):
        return 0.2 * xlag / (1.0 + xlag ** 10) - 0.1 * xt

    for i in range(lag, lag + steps):
        d0 = x[i - lag]
        d1 = x[i - lag + 1]
        dm = 0.5 * (d0 + d1)
        k1 = f(x[i], d0)
        k2 = f(x[i] + 0.5 * h * k1, dm)
        k3 = f(x[i] + 0.5 * h * k2, dm)
        k4 = f(x[i] + h * k3, d1)
        x[i + 1] = x[i] + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    series = x[lag::int(1 / h)][1000:]
    rows, y = [], []
    for t in range(30, 30 + 1385):
        rows.append([series[t - 6 * k] for k in range(5, -1, -1)])
        y.append(float(series[t + 6]))
    emit(out, "mackey-glass17", y, dense_rows(np.array(rows)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    ap.add_argument("--cache", default="/tmp/ssn-wheels")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    os.makedirs(args.cache, exist_ok=True)
    build_keel(args.out, fetch(args.cache, "keel"))
    build_mlxtend(args.out, fetch(args.cache, "mlxtend"))
    build_abalone(args.out, fetch(args.cache, "sklego"))
    build_adult(args.out, fetch(args.cache, "responsibly"))
    build_mackey_glass(args.out)


if __name__ == "__main__":
    main()
