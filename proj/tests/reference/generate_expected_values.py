#!/usr/bin/env python3
"""Independent reference walk used to freeze expected values in the C++ tests.

Re-run with `python3 generate_expected_values.py` and compare against the
constants in tests/test_prng.cpp and tests/test_core.cpp. Python integers make
the 64-bit arithmetic explicit, and Python floats are IEEE doubles evaluated
left to right, so the statistical values reproduce the C++ results bit for
bit (the build disables FP contraction).
"""

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def sm_step(state):
    """One SplitMix64 step: returns (output, advanced state)."""
    state = (state + GOLDEN) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return (z ^ (z >> 31)), state


def substream_state(seed, rank):
    """Per-rank stream derivation: one step applied to seed ^ ((rank+1)*GOLDEN)."""
    base = (seed ^ (((rank + 1) * GOLDEN) & MASK)) & MASK
    out, _ = sm_step(base)
    return out


def bootstrap_variance(data, n_resamples, seed):
    """Row-major resampling walk and two-pass population variance."""
    state = seed
    means = []
    for _ in range(n_resamples):
        acc = 0.0
        for _ in range(len(data)):
            out, state = sm_step(state)
            acc += data[out % len(data)]
        means.append(acc / len(data))
    mu = 0.0
    for m in means:
        mu += m
    mu /= len(means)
    acc = 0.0
    for m in means:
        d = m - mu
        acc += d * d
    return means, acc / len(means)


def main():
    print("splitmix64 outputs from state 0:")
    s = 0
    for i in range(3):
        out, s = sm_step(s)
        print(f"  out[{i}] = {out:#018x} = {out}")

    print("splitmix64 outputs from state 205:")
    s = 205
    for i in range(5):
        out, s = sm_step(s)
        print(f"  out[{i}] = {out}")

    print("rank_substream states:")
    for seed in (205, 0):
        for rank in range(4):
            print(f"  substream(seed={seed}, rank={rank}) = {substream_state(seed, rank)}")

    print("bounded indices (bound=10) from state 205:")
    s = 205
    seq = []
    for _ in range(8):
        out, s = sm_step(s)
        seq.append(out % 10)
    print(f"  {seq}")

    means, var = bootstrap_variance([1.0, 2.0, 3.0, 4.0], 2, 205)
    print(f"bootstrap walk D=4 N=2 seed=205: means={means} variance={var!r}")


if __name__ == "__main__":
    main()
