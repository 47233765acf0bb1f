"""Rebuild the bundled UCI-style CSV files from locally installable packages.

Sources (all are redistributions of the UCI Machine Learning Repository files):
  wdbc.csv   scikit-learn  sklearn/datasets/data/breast_cancer.csv
  sonar.csv  keel-ds       keel_ds/data/balanced/raw/sonar.dat
  pima.csv   keel-ds       keel_ds/data/balanced/raw/pima.dat
  heart.csv  Orange3       Orange/datasets/heart_disease.tab (Cleveland, 303 rows)

Usage:
  pip download --no-deps keel-ds Orange3 -d /tmp/wheels
  python3 prepare_datasets.py /tmp/wheels
"""

import csv
import glob
import os
import sys
import zipfile

import sklearn

HERE = os.path.dirname(os.path.abspath(__file__))


def wheel(pattern, wheels):
    (path,) = glob.glob(os.path.join(wheels, pattern))
    return zipfile.ZipFile(path)


def keel_rows(z, name):
    text = z.read(f"keel_ds/data/balanced/raw/{name}.dat").decode()
    return [
        [c.strip() for c in line.split(",")]
        for line in text.splitlines()
        if line.strip() and not line.startswith("@")
    ]


def write(name, header, rows):
    with open(os.path.join(HERE, name), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        if header:
            w.writerow(header)
        w.writerows(rows)


def wdbc():
    src = os.path.join(os.path.dirname(sklearn.__file__), "datasets", "data", "breast_cancer.csv")
    with open(src) as f:
        lines = list(csv.reader(f))[1:]
    names = [
        f"{stat}_{feat}"
        for stat in ("mean", "se", "worst")
        for feat in (
            "radius", "texture", "perimeter", "area", "smoothness",
            "compactness", "concavity", "concave_points", "symmetry", "fractal_dimension",
        )
    ]
    rows = []
    for i, r in enumerate(lines, start=1):
        # sklearn encodes 0 = malignant, 1 = benign; the original sample ids are
        # not shipped, so the id column holds the 1-based row number.
        diagnosis = "M" if r[-1] == "0" else "B"
        rows.append([str(i), diagnosis] + r[:-1])
    write("wdbc.csv", ["id", "diagnosis"] + names, rows)


def sonar(keel):
    write("sonar.csv", None, keel_rows(keel, "sonar"))


def pima(keel):
    rows = []
    for r in keel_rows(keel, "pima"):
        label = {"tested_positive": "1", "tested_negative": "0"}[r[-1]]
        rows.append(r[:-1] + [label])
    header = ["pregnancies", "glucose", "blood_pressure", "skin_thickness",
              "insulin", "bmi", "pedigree", "age", "outcome"]
    write("pima.csv", header, rows)


def heart(orange):
    text = orange.read("Orange/datasets/heart_disease.tab").decode()
    lines = [l.split("\t") for l in text.splitlines()][3:]
    codes = {
        1: {"female": "0", "male": "1"},
        2: {"typical ang": "1", "atypical ang": "2", "non-anginal": "3", "asymptomatic": "4"},
        6: {"normal": "0", "ST-T abnormal": "1", "left vent hypertrophy": "2"},
        10: {"upsloping": "1", "flat": "2", "downsloping": "3"},
        12: {"normal": "3", "fixed defect": "6", "reversable defect": "7"},
    }
    # Six rows lack ca/thal; fill with the column mode (ca = 0, thal = normal).
    fill = {11: "0", 12: "normal"}
    rows = []
    for r in lines:
        if not any(c.strip() for c in r):
            continue
        out = []
        for i, c in enumerate(r):
            c = c.strip()
            if c in ("", "?"):
                c = fill[i]
            out.append(codes[i][c] if i in codes else c)
        rows.append(out)
    header = ["age", "sex", "cp", "trestbps", "chol", "fbs", "restecg", "thalach",
              "exang", "oldpeak", "slope", "ca", "thal", "target"]
    write("heart.csv", header, rows)


def main():
    wheels = sys.argv[1]
    keel = wheel("keel_ds-*.whl", wheels)
    orange = wheel("orange3-*.whl", wheels)
    wdbc()
    sonar(keel)
    pima(keel)
    heart(orange)


if __name__ == "__main__":
    main()
