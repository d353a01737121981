#!/usr/bin/env python3
# Copyright 2026 The cfaudit Authors.
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
"""Regenerates the example datasets in this directory.

iris.csv comes from scikit-learn's bundled copy. pima_synthetic.csv and
credit_synthetic.csv are simulated with fixed seeds; they mimic the column
layout of the public diabetes and credit datasets but contain no real records.
"""

import csv
import json
import math
import pathlib
import random

HERE = pathlib.Path(__file__).resolve().parent


def write(name, header, rows):
    with open(HERE / name, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def dump_schema(name, schema):
    (HERE / name).write_text(json.dumps(schema, indent=2) + "\n")


def iris():
    from sklearn.datasets import load_iris

    ds = load_iris()
    names = ["sepal_length", "sepal_width", "petal_length", "petal_width"]
    labels = ["setosa", "versicolor", "virginica"]
    rows = [[*map(lambda v: f"{v:g}", x), labels[y]] for x, y in zip(ds.data, ds.target)]
    write("iris.csv", names + ["species"], rows)
    dump_schema("iris.schema.json", {
        "features": [{"name": n, "kind": "continuous", "min": 0, "max": 10} for n in names],
        "target": {"name": "species", "classes": labels},
    })


def pima():
    rng = random.Random(1988)
    rows = []
    for _ in range(768):
        age = min(81, 21 + int(rng.expovariate(1 / 12)))
        preg = min(17, int(rng.expovariate(1 / 3.8)))
        glucose = min(199, max(44, round(rng.gauss(121, 31))))
        bp = min(122, max(24, round(rng.gauss(72, 12))))
        skin = min(99, max(7, round(rng.gauss(29, 10))))
        insulin = min(846, max(14, round(rng.lognormvariate(4.8, 0.6))))
        bmi = round(min(67.1, max(18.2, rng.gauss(32.4, 6.9))), 1)
        pedigree = round(min(2.42, max(0.078, rng.lognormvariate(-0.9, 0.6))), 3)
        z = (-9.2 + 0.036 * glucose + 0.09 * bmi + 0.9 * pedigree + 0.012 * age
             + 0.06 * preg + rng.gauss(0, 0.6))
        outcome = 1 if rng.random() < 1 / (1 + math.exp(-z)) else 0
        rows.append([preg, glucose, bp, skin, insulin, bmi, pedigree, age, outcome])
    header = ["pregnancies", "glucose", "blood_pressure", "skin_thickness", "insulin", "bmi",
              "pedigree", "age", "outcome"]
    write("pima_synthetic.csv", header, rows)

    def feat(name, lo, hi, step=None, mutable=True):
        f = {"name": name, "kind": "continuous", "min": lo, "max": hi, "mutable": mutable}
        if step is not None:
            f["step"] = step
        return f

    dump_schema("pima.schema.json", {
        "features": [
            feat("pregnancies", 0, 20, 1), feat("glucose", 0, 300), feat("blood_pressure", 0, 150),
            feat("skin_thickness", 0, 100), feat("insulin", 0, 900), feat("bmi", 10, 70),
            feat("pedigree", 0, 2.5), feat("age", 18, 100, 1),
        ],
        "target": {"name": "outcome", "classes": ["0", "1"], "favorable": "0"},
    })


def credit():
    rng = random.Random(2019)
    races = ["White", "Black", "Asian", "Other"]
    rows = []
    for _ in range(600):
        race = rng.choices(races, weights=[0.6, 0.18, 0.12, 0.10])[0]
        gender = rng.choice(["F", "M"])
        income = round(max(8.0, rng.gauss(52, 18)), 1)
        debt = round(max(0.0, rng.gauss(14, 8)), 1)
        years = min(40, int(rng.expovariate(1 / 6)))
        # Deliberately biased labelling so the burden audit has something to find.
        penalty = {"White": 0.0, "Asian": 0.3, "Black": 1.4, "Other": 1.2}[race]
        z = -2.0 + 0.06 * income - 0.09 * debt + 0.08 * years - penalty + rng.gauss(0, 0.5)
        approved = 1 if z > 0 else 0
        rows.append([income, debt, years, race, gender, approved])
    write("credit_synthetic.csv",
          ["income", "debt", "years_employed", "race", "gender", "approved"], rows)
    dump_schema("credit.schema.json", {
        "features": [
            {"name": "income", "kind": "continuous", "min": 0, "max": 200},
            {"name": "debt", "kind": "continuous", "min": 0, "max": 100},
            {"name": "years_employed", "kind": "continuous", "min": 0, "max": 45, "step": 1},
            {"name": "race", "kind": "categorical", "categories": races, "mutable": False},
            {"name": "gender", "kind": "categorical", "categories": ["F", "M"], "mutable": False},
        ],
        "target": {"name": "approved", "classes": ["0", "1"], "favorable": "1"},
    })


if __name__ == "__main__":
    iris()
    pima()
    credit()
