"""Vital-sign estimation on synthetic chest returns: per-window Gabor phase
features (spectral peak + zero-crossing rate per wavelength) feed random
forest and linear regressors, cross-validated against the raw temporal-FFT
baseline.  Heart-rate estimation is where the baseline collapses: breathing
harmonics swamp the tiny cardiac peak in the raw spectra.

Run from the repository root:  python demos/04_vital_sign_regression.py
(about a minute; use --records N to resize)
"""

import argparse

import numpy as np

import radarmag as rm

parser = argparse.ArgumentParser()
parser.add_argument("--records", type=int, default=15, help="number of 60 s records")
args = parser.parse_args()

fps, duration, n_bins = 20.0, 60.0, 96
roi = rm.RangeROI(34, 62)
wspec = rm.WindowSpec(30.0, 5.0)
bank = rm.default_bank()
bands = {"RR": rm.BandSpec(0.1, 0.7), "HR": rm.BandSpec(0.7, 3.0)}

rows = {"RR": [], "HR": []}
baseline = {"RR": [], "HR": []}
params = np.random.default_rng(42)

print(f"simulating {args.records} records of {duration:.0f} s "
      f"(breathing 0.2-0.35 Hz, cardiac 1.0-1.6 Hz, sub-bin amplitudes)")
for rec in range(args.records):
    f_breath = params.uniform(0.2, 0.35)
    f_cardiac = params.uniform(1.0, 1.6)
    scene = rm.SceneSpec(
        duration_s=duration, fps=fps, n_bins=n_bins, bin_spacing=0.01,
        targets=(
            rm.TargetSpec("sinusoid", 0.48, 1.0, amplitude_bins=params.uniform(0.3, 1.0),
                          freq_hz=f_breath),
            rm.TargetSpec("sinusoid", 0.48, 0.6, amplitude_bins=params.uniform(0.01, 0.05),
                          freq_hz=f_cardiac),
        ),
        noise_sigma=0.02)
    record, _ = rm.simulate(scene, seed=1000 + rec)
    t = np.arange(0.0, duration, 1.0)
    for vital, truth in (("RR", f_breath * 60), ("HR", f_cardiac * 60)):
        labels = np.column_stack([t, np.full_like(t, truth)])
        rows[vital].extend(rm.featurize(record, bank, wspec, bands[vital], roi, labels=labels))
        for _, window in rm.windows(record, wspec):
            estimate = rm.temporal_fft_baseline(window, roi, bands[vital])
            baseline[vital].append(abs(estimate - truth))

print(f"{len(rows['RR'])} windows x {2 * len(bank)} features per vital\n")
print(f"{'':6s}{'temporal FFT':>14s}{'RF':>10s}{'LR':>10s}   (10-fold CV MAE, bpm)")
for vital in ("RR", "HR"):
    data = rm.Dataset.from_rows(rows[vital])
    rf = rm.kfold_mae(data, k=10, model="rf", seed=0).mean_mae
    lr = rm.kfold_mae(data, k=10, model="ols", seed=0, ridge=1e-8).mean_mae
    print(f"{vital:6s}{np.mean(baseline[vital]):14.2f}{rf:10.2f}{lr:10.2f}")

print("\nGabor features + regression beat the raw-spectrum baseline, most "
      "sharply for heart rate.")
