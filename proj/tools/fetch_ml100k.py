#!/usr/bin/env python3
# Copyright 2026 The EigenSim Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Materialize MovieLens 100K as data/ml-100k.dat (user::item::rating::timestamp).

Tries, in order: an existing u.data passed via --udata, the GroupLens zip,
and the copy bundled inside the pytorch-widedeep wheel (pip download only,
nothing is installed).
"""

import argparse
import glob
import io
import os
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

GROUPLENS_URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
WHEEL_MEMBER = "pytorch_widedeep/datasets/data/MovieLens100k_data.parquet.brotli"


def rows_from_udata(text):
    for line in text.splitlines():
        if line.strip():
            u, i, r, t = line.split("\t")
            yield u, i, r, t


def from_grouplens():
    with urllib.request.urlopen(GROUPLENS_URL, timeout=30) as resp:
        z = zipfile.ZipFile(io.BytesIO(resp.read()))
    return list(rows_from_udata(z.read("ml-100k/u.data").decode()))


def from_widedeep_wheel():
    import pandas as pd

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", tmp,
             "pytorch-widedeep"],
            check=True)
        wheel = glob.glob(os.path.join(tmp, "*.whl"))[0]
        data = zipfile.ZipFile(wheel).read(WHEEL_MEMBER)
    df = pd.read_parquet(io.BytesIO(data))
    return [(str(a), str(b), str(c), str(d)) for a, b, c, d in df.itertuples(index=False)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data",
                                                  "ml-100k.dat"))
    ap.add_argument("--udata", help="path to an existing ml-100k/u.data")
    args = ap.parse_args()

    if args.udata:
        with open(args.udata) as f:
            rows = list(rows_from_udata(f.read()))
    else:
        try:
            rows = from_grouplens()
        except Exception as exc:  # noqa: BLE001
            print(f"grouplens download failed ({exc}); using pytorch-widedeep wheel",
                  file=sys.stderr)
            rows = from_widedeep_wheel()

    if len(rows) != 100000:
        sys.exit(f"expected 100000 ratings, got {len(rows)}")
    os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
    with open(args.out, "w") as f:
        for u, i, r, t in rows:
            f.write(f"{u}::{i}::{r}::{t}\n")
    print(f"wrote {len(rows)} ratings to {args.out}")


if __name__ == "__main__":
    main()
