"""Time the compiled kernels against the numpy fallback on realistic sizes.

Run:  python3 benchmarks/bench_backends.py [--duration-s 60] [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from specamp import backend, hamming_window
from specamp.signal_io import NoiseSpec, generate_noise
from specamp.spectral import StftConfig


def best_of(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--duration-s", type=float, default=60.0)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    names = [n for n in ("python", "cython") if n in backend.available_backends()]
    if names == ["python"]:
        print("compiled backend not built; timing the numpy fallback only")

    config = StftConfig()
    signal = generate_noise(
        NoiseSpec(kind="white_gaussian", duration_s=args.duration_s, seed=0),
        config.sample_rate_hz,
    )
    window = hamming_window(config.frame_len)
    rng = np.random.default_rng(0)

    # shared inputs so both backends do identical work
    mags = backend.kernels().frame_magnitudes(signal.samples, config.frame_len, config.hop, window)
    scales = mags.mean(axis=0)
    spectra = mags * np.exp(2j * np.pi * rng.random(mags.shape))
    spectra[:, 0] = np.abs(spectra[:, 0])
    spectra[:, -1] = np.abs(spectra[:, -1])
    frames = backend.kernels().irfft_frames(spectra)
    ola_window = np.sin(np.pi * np.arange(config.frame_len) / config.frame_len)

    cases = {
        "frame_magnitudes": lambda k: k.frame_magnitudes(
            signal.samples, config.frame_len, config.hop, window
        ),
        "column_mean_var": lambda k: k.column_mean_var(mags),
        "column_histograms": lambda k: k.column_histograms(mags, scales, 5.0, 64),
        "irfft_frames": lambda k: k.irfft_frames(spectra),
        "overlap_add": lambda k: k.overlap_add(frames, ola_window, config.hop),
    }

    print(
        f"{mags.shape[0]} frames x {mags.shape[1]} bins "
        f"({args.duration_s:g} s at {config.sample_rate_hz} Hz), best of {args.repeats}"
    )
    header = f"{'kernel':20s}" + "".join(f"{n:>12s}" for n in names)
    print(header + ("       ratio" if len(names) == 2 else ""))
    for case_name, call in cases.items():
        row = f"{case_name:20s}"
        timings = []
        for backend_name in names:
            backend.select(backend_name)
            kern = backend.kernels()
            timings.append(best_of(lambda: call(kern), args.repeats))
            row += f"{timings[-1] * 1e3:10.2f}ms"
        if len(timings) == 2:
            row += f"{timings[0] / timings[1]:11.2f}x"
        print(row)
    backend.select("auto")


if __name__ == "__main__":
    main()
