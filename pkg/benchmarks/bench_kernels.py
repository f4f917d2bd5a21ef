"""Compare the compiled fire kernels against the numpy fallback.

Times the raw per-fire kernels on representative window shapes, then a full
streaming pass over the stock model, for every available backend::

    python benchmarks/bench_kernels.py --repeats 5
"""

import argparse
import time

import numpy as np

from convstream import StreamingNetwork, random_input, reference_model
from convstream import kernels
from convstream.kernels import available_backends, use_backend

FIRE_SHAPES = [
    # (label, filters, channels, kernel)
    ("entry 8f x 3ch x 8", 8, 3, 8),
    ("mid   8f x 8ch x 8", 8, 8, 8),
    ("wide 32f x 16ch x 16", 32, 16, 16),
]


def bench_fire(filters, channels, kernel, iterations):
    rng = np.random.default_rng(0)
    bank = rng.standard_normal((channels, kernel)).astype(np.float32)
    weights = rng.standard_normal((filters, channels, kernel)).astype(np.float32)
    bias = rng.standard_normal(filters).astype(np.float32)
    conv_fire = kernels.conv_fire
    start = time.perf_counter()
    for i in range(iterations):
        conv_fire(bank, i % kernel, weights, bias, True)
    return (time.perf_counter() - start) / iterations


def bench_stream(model, x, repeats):
    net = StreamingNetwork(model)
    best = float("inf")
    for _ in range(repeats):
        net.reset()
        start = time.perf_counter()
        for row in x:
            net.step(row)
        net.finalize()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="streaming passes per backend (best is kept)")
    parser.add_argument("--fire-iterations", type=int, default=20000)
    args = parser.parse_args()

    model = reference_model(seed=0)
    x = random_input(model, seed=1)
    backends = available_backends()
    print(f"backends: {', '.join(backends)}")

    fire_us = {}
    for name in backends:
        use_backend(name)
        fire_us[name] = [
            bench_fire(f, c, k, args.fire_iterations) * 1e6
            for _, f, c, k in FIRE_SHAPES
        ]
    print("\nper-fire kernel (us/call)")
    for i, (label, *_r) in enumerate(FIRE_SHAPES):
        row = "  ".join(f"{name} {fire_us[name][i]:8.3f}" for name in backends)
        print(f"  {label:<22} {row}")

    print("\nstreaming pass, 460 samples x 3 channels (ms)")
    pass_ms = {}
    for name in backends:
        use_backend(name)
        pass_ms[name] = bench_stream(model, x, args.repeats) * 1e3
        print(f"  {name:<8} {pass_ms[name]:8.2f}")
    if "cython" in pass_ms and "python" in pass_ms:
        print(f"\nspeedup (python/cython): "
              f"{pass_ms['python'] / pass_ms['cython']:.2f}x")
    use_backend(backends[-1] if "cython" not in backends else "cython")


if __name__ == "__main__":
    main()
