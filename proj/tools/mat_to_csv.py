#!/usr/bin/env python3
"""Convert ODDS .mat files (X, y) to the CSV layout `bench` reads."""

import argparse
import pathlib

import numpy as np
import scipy.io


def load(path):
    try:
        m = scipy.io.loadmat(path)
        return np.asarray(m["X"], dtype=float), np.asarray(m["y"]).ravel()
    except NotImplementedError:
        import h5py  # MATLAB v7.3 files

        with h5py.File(path, "r") as f:
            return np.asarray(f["X"], dtype=float).T, np.asarray(f["y"]).ravel()


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("mat", nargs="+", type=pathlib.Path)
    p.add_argument("--out", type=pathlib.Path, default=pathlib.Path("data"))
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for src in args.mat:
        x, y = load(src)
        header = ",".join(f"f{i}" for i in range(x.shape[1])) + ",label"
        table = np.column_stack([x, y.astype(int)])
        fmt = ["%.17g"] * x.shape[1] + ["%d"]
        dst = args.out / (src.stem.lower() + ".csv")
        np.savetxt(dst, table, delimiter=",", header=header, comments="", fmt=fmt)
        print(f"{src} -> {dst}: {x.shape[0]} rows, {x.shape[1]} features, {int(y.sum())} outliers")


if __name__ == "__main__":
    main()
