"""Generate the synthetic sample market data set.

The curve and volatilities are illustrative: a negative short end rising to
about 50 bp at 30 years, and a normal-vol surface of 35 to 60 bp. They are
not market observations.
"""

import csv
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

HERE = Path(__file__).resolve().parent

ANCHORS = {
    0.25: -0.0040, 0.5: -0.0040, 1: -0.0038, 2: -0.0033, 3: -0.0027, 4: -0.0020,
    5: -0.0012, 6: -0.0004, 7: 0.0003, 10: 0.0020, 15: 0.0040, 20: 0.0048, 30: 0.0049,
}
KNOTS = [0.25, 0.5] + list(range(1, 31))
MATURITIES = list(range(1, 11)) + [12, 15, 20]
TENORS = [1, 2, 5, 7, 10]
BERMUDAN_MATURITIES = [1, 3, 5, 7, 10]
BERMUDAN_TENORS = [2, 5, 7, 10]
CMS_ROWS = [(0, 5, 5), (0, 10, 5), (0, 5, 10), (0, 10, 10), (3, 5, 5),
            (3, 5, 10), (5, 10, 5), (5, 5, 5), (5, 5, 10)]


def curve():
    t = np.array(sorted(ANCHORS))
    r = PchipInterpolator(t, [ANCHORS[k] for k in t])(KNOTS)
    return [(m, round(float(z), 6)) for m, z in zip(KNOTS, r)]


def discount_fn(points):
    t = np.array([p[0] for p in points])
    z = np.array([p[1] for p in points])
    spline = CubicSpline(t, z, bc_type="natural")

    def df(x):
        rate = z[0] if x <= t[0] else float(spline(x))
        return float(np.exp(-rate * x))

    return df


def forward_swap(df, start, tenor):
    annuity = sum(df(start + i) for i in range(1, tenor + 1))
    return (df(start) - df(start + tenor)) / annuity


def normal_vol_bps(m, t):
    return 38.0 + 18.0 * (1 - np.exp(-m / 4.0)) - 4.0 * (1 - np.exp(-t / 6.0)) + 2.0 * np.exp(-((m - 7) ** 2) / 8)


def main():
    pts = curve()
    with open(HERE / "curve.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["maturity_years", "zero_rate", "discount"])
        for m, z in pts:
            w.writerow([m, f"{z:.6f}", f"{np.exp(-z * m):.17g}"])
    df = discount_fn(pts)

    with open(HERE / "surface_payer.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["maturity_years", "tenor_years", "strike", "normal_vol_bps", "price"])
        for m in MATURITIES:
            for t in TENORS:
                w.writerow([m, t, f"{forward_swap(df, m, t):.17g}", f"{normal_vol_bps(m, t):.2f}", ""])

    with open(HERE / "bermudan_strikes.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["maturity_years", "tenor_years", "strike", "reference"])
        for m in BERMUDAN_MATURITIES:
            for t in BERMUDAN_TENORS:
                w.writerow([m, t, f"{forward_swap(df, m, t):.17g}", ""])

    with open(HERE / "cms_requests.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["effective_years", "tenor_years", "index_years", "reference"])
        for row in CMS_ROWS:
            w.writerow([*row, ""])


if __name__ == "__main__":
    main()
