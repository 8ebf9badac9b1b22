"""Generate the synthetic California-like inputs in data/.

Hourly global horizontal irradiance for a San Francisco-like site (clear-sky
geometry times a random cloud factor) and premium survey answers in $/month
drawn from a truncated exponential. Deterministic for a given seed.
"""

import argparse
import math
from pathlib import Path

import numpy as np

LATITUDE = 37.77


def irradiance(rng, years):
    hours = np.arange(365 * 24 * len(years))
    day_of_year = (hours // 24) % 365
    hour = hours % 24 + 0.5
    decl = np.radians(23.44) * np.sin(2 * np.pi * (284 + day_of_year + 1) / 365)
    lat = np.radians(LATITUDE)
    hour_angle = np.radians(15.0 * (hour - 12.0))
    sin_elev = np.sin(lat) * np.sin(decl) + np.cos(lat) * np.cos(decl) * np.cos(hour_angle)
    clear = 1050.0 * np.clip(sin_elev, 0.0, None) ** 1.15
    cloudy = rng.random(hours.size) < 0.3
    factor = np.where(cloudy, rng.beta(2.0, 3.0, hours.size), rng.beta(9.0, 1.4, hours.size))
    ghi = np.round(clear * factor, 1)
    stamps = []
    for y in years:
        start = np.datetime64(f"{y}-01-01T00:00")
        stamps.extend(str(start + np.timedelta64(h, "h")) + ":00Z" for h in range(365 * 24))
    return stamps, ghi


def truncated_exponential_rate(mean, v_bar):
    def model_mean(rate):
        x = rate * v_bar
        if abs(x) < 1e-8:
            return v_bar / 2
        return v_bar * (1.0 / x - 1.0 / math.expm1(x))

    lo, hi = -500.0 / v_bar, 500.0 / v_bar
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if model_mean(mid) > mean:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def survey(rng, n, mean, v_bar, monthly_kwh, inflation):
    rate = truncated_exponential_rate(mean, v_bar)
    u = rng.random(n - 1)
    v = -np.log1p(-u * -math.expm1(-rate * v_bar)) / rate
    v = np.append(v, v_bar)  # the top answer pins the support
    return np.round(v * monthly_kwh / inflation, 4)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    parser.add_argument("--seed", type=int, default=20231)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)
    args.out_dir.mkdir(parents=True, exist_ok=True)

    stamps, ghi = irradiance(rng, [2021, 2022])
    with open(args.out_dir / "california_irradiance.csv", "w", newline="\n") as f:
        f.write("timestamp,ghi_w_per_m2\n")
        for s, g in zip(stamps, ghi):
            f.write(f"{s},{g:.1f}\n")

    answers = survey(rng, 800, mean=0.0286, v_bar=0.1657, monthly_kwh=600.0, inflation=1.83)
    with open(args.out_dir / "california_survey.csv", "w", newline="\n") as f:
        f.write("usd_per_month\n")
        for a in answers:
            f.write(f"{a:.4f}\n")


if __name__ == "__main__":
    main()
