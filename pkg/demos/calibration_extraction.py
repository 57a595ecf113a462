"""Timescale extraction from synthetic delay-sweep measurements.

Simulates noisy signal/reference PL traces at several laser intensities,
extracts the readout and initialization times from each, fits the
log-quadratic intensity curves, and compares them with the generating
model.
"""

import numpy as np

from qdmsim import (PhotophysicsModel, end_to_end_pipeline, extract_times,
                    init_time, simulate_calibration)


def run_demo():
    model = PhotophysicsModel()
    intensities = (0.01, 0.03, 0.1, 0.3, 1.0, 3.0)
    grids = [np.linspace(0.0, 1.25 * init_time(model, i), 1200)
             for i in intensities]

    # a 3% contrast needs heavy shot averaging before it rises out of the
    # counting noise: ~15 counts/us means ~0.2% contrast noise at 5e5 shots
    shots = 500_000
    print(f"single noisy trace at I = 1 mW/um^2, {shots} shots per point:")
    trace = simulate_calibration(model, 1.0, grids[4], shots, seed=12)
    times = extract_times(trace)
    print(f"  extracted t_ro   = {times.t_ro:.3f} us")
    print(f"  extracted t_init = {times.t_init:.3f} us "
          f"(model: {init_time(model, 1.0):.3f} us)")
    print(f"  peak contrast    = {times.peak_contrast:.4f}")
    for w in times.warnings:
        print(f"  warning: {w}")
    print("  (the first-crossing rule reads a noisy tail early; noiseless"
          " traces below recover the model exactly)")

    print("\nfull pipeline, noiseless traces:")
    clean = end_to_end_pipeline(model, intensities, grids, 1, 99,
                                noiseless=True)
    print(f"  fitted init curve    a={clean.init_curve.a:+.4f} "
          f"b={clean.init_curve.b:+.4f} c={clean.init_curve.c:+.4f}")
    print(f"  generating curve     a={model.init_curve.a:+.4f} "
          f"b={model.init_curve.b:+.4f} c={model.init_curve.c:+.4f}")

    print(f"\nfull pipeline, {shots} shots per point:")
    noisy = end_to_end_pipeline(model, intensities, grids, shots, 99)
    print(f"  fitted init curve    a={noisy.init_curve.a:+.4f} "
          f"b={noisy.init_curve.b:+.4f} c={noisy.init_curve.c:+.4f}")
    print("  per-intensity extracted times:")
    for intensity, t_ro, t_init in noisy.samples:
        print(f"    I = {intensity:5.2f}: t_ro = {t_ro:8.3f} us, "
              f"t_init = {t_init:8.3f} us")


if __name__ == "__main__":
    run_demo()
