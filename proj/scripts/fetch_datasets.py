#!/usr/bin/env python3
"""Materialize the benchmark datasets under data/ in their canonical UCI layouts.

Each dataset is fetched from the UCI repository first. When UCI is not
reachable, the script falls back to byte-identical (or value-identical) copies
shipped inside well-known Python packages:

  iris       scikit-learn bundled iris.csv
  wbc        scikit-learn bundled breast_cancer.csv (WDBC, ids are row numbers)
  digits     keel-ds wheel (optdigits.dat == optdigits.tra + optdigits.tes)
  satellite  imbalanced-databases wheel (sat.trn / sat.tst, unmodified)
  eeg        no mirror; UCI only

Usage: scripts/fetch_datasets.py [--data-dir data] [--only iris,wbc,...] [--wheel-dir DIR]
"""

import argparse
import io
import os
import subprocess
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

SOURCES = {
    "iris": [(f"{UCI}/iris/iris.data", "iris/iris.data")],
    "wbc": [(f"{UCI}/breast-cancer-wisconsin/wdbc.data", "wdbc/wdbc.data")],
    "digits": [
        (f"{UCI}/optdigits/optdigits.tra", "optdigits/optdigits.tra"),
        (f"{UCI}/optdigits/optdigits.tes", "optdigits/optdigits.tes"),
    ],
    "satellite": [
        (f"{UCI}/statlog/satimage/sat.trn", "satellite/sat.trn"),
        (f"{UCI}/statlog/satimage/sat.tst", "satellite/sat.tst"),
    ],
    "eeg": [(f"{UCI}/00264/EEG%20Eye%20State.arff", "eeg/eeg_eye_state.arff")],
}


def fetch_url(url, timeout=20):
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read()


WHEEL_DIRS = []


def pip_wheel(package, workdir):
    prefix = package.replace("-", "_")
    for directory in WHEEL_DIRS:
        for path in sorted(Path(directory).rglob(prefix + "-*.whl")):
            return zipfile.ZipFile(path)
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-q", package, "-d", workdir],
        check=True,
    )
    for name in os.listdir(workdir):
        if name.endswith(".whl") and name.lower().startswith(prefix):
            return zipfile.ZipFile(os.path.join(workdir, name))
    raise RuntimeError(f"wheel for {package} not found")


def sklearn_csv(name):
    import sklearn

    path = Path(sklearn.__file__).parent / "datasets" / "data" / name
    lines = path.read_text().splitlines()
    return lines[0].split(","), [l.split(",") for l in lines[1:] if l.strip()]


def fallback_iris():
    header, rows = sklearn_csv("iris.csv")
    names = ["Iris-" + n for n in header[2:]]
    out = io.StringIO()
    for r in rows:
        out.write(",".join(r[:4]) + "," + names[int(r[4])] + "\n")
    return {"iris/iris.data": out.getvalue().encode()}


def fallback_wbc():
    _, rows = sklearn_csv("breast_cancer.csv")
    out = io.StringIO()
    for i, r in enumerate(rows, start=1):
        diagnosis = "M" if r[-1] == "0" else "B"
        out.write(",".join([str(i), diagnosis] + r[:-1]) + "\n")
    return {"wdbc/wdbc.data": out.getvalue().encode()}


def fallback_digits():
    with tempfile.TemporaryDirectory() as tmp:
        wheel = pip_wheel("keel-ds", tmp)
        lines = wheel.read("keel_ds/data/balanced/raw/optdigits.dat").decode().splitlines()
    lines = [l for l in lines if l and not l.startswith("@")]
    if len(lines) != 5620:
        raise RuntimeError(f"unexpected optdigits row count {len(lines)}")
    return {
        "optdigits/optdigits.tra": ("\n".join(lines[:3823]) + "\n").encode(),
        "optdigits/optdigits.tes": ("\n".join(lines[3823:]) + "\n").encode(),
    }


def fallback_satellite():
    with tempfile.TemporaryDirectory() as tmp:
        wheel = pip_wheel("imbalanced-databases", tmp)
        base = "imbalanced_databases/data/satimage/"
        return {
            "satellite/sat.trn": wheel.read(base + "sat.trn.txt"),
            "satellite/sat.tst": wheel.read(base + "sat.tst.txt"),
        }


FALLBACKS = {
    "iris": fallback_iris,
    "wbc": fallback_wbc,
    "digits": fallback_digits,
    "satellite": fallback_satellite,
}


def arff_to_csv(raw):
    header, rows, in_data = [], [], False
    for line in raw.decode().splitlines():
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        lower = line.lower()
        if lower.startswith("@attribute"):
            header.append(line.split()[1])
        elif lower.startswith("@data"):
            in_data = True
        elif in_data:
            rows.append(line)
    return (",".join(header) + "\n" + "\n".join(rows) + "\n").encode()


def materialize(dataset, data_dir):
    files = {}
    try:
        for url, rel in SOURCES[dataset]:
            files[rel] = fetch_url(url)
        origin = "uci"
    except Exception as err:  # noqa: BLE001
        if dataset not in FALLBACKS:
            raise RuntimeError(f"{dataset}: UCI unreachable ({err}) and no package mirror exists") from err
        files = FALLBACKS[dataset]()
        origin = "package mirror"
    if dataset == "eeg":
        files = {"eeg/eeg_eye_state.csv": arff_to_csv(files["eeg/eeg_eye_state.arff"])}
    for rel, payload in files.items():
        path = data_dir / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    return origin, sorted(files)


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--data-dir", default=Path(__file__).resolve().parent.parent / "data", type=Path)
    parser.add_argument("--only", default=",".join(SOURCES))
    parser.add_argument("--wheel-dir", action="append", default=[], help="search here for cached wheels first")
    args = parser.parse_args()
    WHEEL_DIRS.extend(args.wheel_dir)

    status = 0
    for dataset in args.only.split(","):
        try:
            origin, written = materialize(dataset, args.data_dir)
            print(f"{dataset}: {origin} -> {', '.join(written)}")
        except Exception as err:  # noqa: BLE001
            print(f"{dataset}: FAILED: {err}", file=sys.stderr)
            status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
