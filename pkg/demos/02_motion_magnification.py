"""Synthetic-scene motion magnification: a 45 Hz oscillation of a tenth of a
range bin is magnified 11x and 51x without touching the static reflectors or
the constant-velocity mover, then attenuated away with a negative alpha.

Run from the repository root:  python demos/02_motion_magnification.py
Writes heatmaps to demos/out/.
"""

import os

import numpy as np

import radarmag as rm

OUT = "demos/out"
os.makedirs(OUT, exist_ok=True)

scene = rm.load_scene_config("configs/validation_scene.cfg")
bank = rm.load_bank_config("configs/magnify_bank.cfg")
band = rm.BandSpec(40.0, 50.0)
roi = rm.RangeROI(100, 156)

radargram, truth = rm.simulate(scene, seed=0)
print(f"scene: {radargram.n_bins} bins x {radargram.n_frames} frames at {radargram.fps:g} fps")
print(f"target: 45 Hz, {scene.targets[0].amplitude_bins} bin amplitude at "
      f"{scene.targets[0].center_range_m} m")

base_trace = rm.estimate_displacement(radargram, roi)
print(f"\nmeasured displacement, original: peak-to-peak {np.ptp(base_trace):.3f} bins")

rm.write_ppm(rm.render_heatmap(radargram), f"{OUT}/scene_original.ppm")

for alpha in (10.0, 50.0):
    magnified = rm.magnify(radargram, bank, rm.MagnifyConfig(alpha=alpha, band=band))
    trace = rm.estimate_displacement(magnified, roi)
    expected = (1 + alpha) * np.ptp(base_trace)
    print(f"alpha={alpha:4.0f}: peak-to-peak {np.ptp(trace):7.3f} bins "
          f"(expected about {expected:.2f})")
    static = (np.linalg.norm(magnified.data[246:274] - radargram.data[246:274])
              / np.linalg.norm(radargram.data[246:274]))
    print(f"            static reflectors changed by {100 * static:.3f}% relative L2")
    rm.write_ppm(rm.render_heatmap(magnified), f"{OUT}/scene_alpha{alpha:.0f}.ppm")

# Attenuation: alpha < 0 dampens the in-band motion instead.
damped = rm.magnify(radargram, bank, rm.MagnifyConfig(alpha=-0.9, band=band))


def peak_45hz(r):
    seg = r.data[roi.slice] - r.data[roi.slice].mean(axis=1, keepdims=True)
    spectra = np.abs(np.fft.rfft(seg, axis=1))
    freqs = np.fft.rfftfreq(r.n_frames, 1.0 / r.fps)
    return spectra[:, (freqs >= 40) & (freqs <= 50)].max()


drop = 20 * np.log10(peak_45hz(damped) / peak_45hz(radargram))
print(f"alpha=-0.9: 45 Hz spectral peak at the target changed by {drop:+.1f} dB")
rm.write_ppm(rm.render_heatmap(damped), f"{OUT}/scene_damped.ppm")

print(f"\nheatmaps written to {OUT}/ (bins vertical, frames horizontal)")
