# File describing how you'd import the package on your project

from hrdepth import DepthLabClient, GridFunction, ProcessKind, ProcessModel, SmoothingDensity

print("--- Simulating Brownian motion and its smoothed version ---")

client = DepthLabClient(jobs=1)
model = ProcessModel(kind=ProcessKind.BROWNIAN_MOTION)
ens = client.simulate(model, n=20_000, m=64, seed=1)
h = GridFunction.constant(ens.grid, 0.0)
print(f"Depth of h=0 for tied-down BM (m=64): {client.depth(ens, h).value:.4f}")

smoothed = client.smooth(ens, SmoothingDensity(family="gaussian", scale=1.0), seed=1)
print(f"Depth of h=0 after Gaussian smoothing: {client.depth(smoothed, h).value:.4f}")
