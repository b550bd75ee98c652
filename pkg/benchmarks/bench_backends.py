"""Benchmark the numba kernel against the pure-numpy fallback.

Times plan application (the hot path: one operator sweep over the
collocation nodes, as in every solver iteration) and a short pseudo-time
solve, for both backends and both dimensions.

Run:
    python benchmarks/bench_backends.py [--repeats 50]
"""

import argparse
import time

import numpy as np

import fracvexp as fx
from fracvexp import ball_solver as bs
from fracvexp._backend import apply_plan
from fracvexp.quadrature import build_plan


def time_apply(plan, values, repeats):
    apply_plan(plan, values)  # warm-up / jit compile
    t0 = time.perf_counter()
    for _ in range(repeats):
        out, _ = apply_plan(plan, values)
    dt = (time.perf_counter() - t0) / repeats
    return dt, float(out.sum())


def bench_dim(dim, n, repeats, stride=1):
    spec = fx.make_spec("example_ii", dimension=dim,
                        order=0.5 if dim == 2 else 0.3, m=0.5)
    u = fx.SampledFunction.from_function(
        lambda p: 0.5 * np.maximum(0.0, 1.0 - (p ** 2).sum(1)) ** 2,
        1.5, n, dim)
    mask = bs.interior_mask(u)
    pts = u.nodes()[mask][::stride]
    cfg = fx.QuadratureConfig()
    t0 = time.perf_counter()
    plan = build_plan(spec, u, pts, cfg, values_bound=1.0)
    build_s = time.perf_counter() - t0

    rows = {}
    for backend in ("numba", "numpy"):
        try:
            fx.set_backend(backend)
        except fx.PreconditionError:
            continue
        dt, checksum = time_apply(plan, u.values, repeats)
        rows[backend] = (dt, checksum)
    fx.set_backend("auto")

    print(f"\n{dim}-d grid {n}^{dim}: {len(pts)} collocation points, "
          f"{len(plan.wk)} quadrature nodes (plan build {build_s:.2f}s)")
    for backend, (dt, checksum) in rows.items():
        print(f"  {backend:6s}: {dt * 1e3:8.2f} ms/apply   (checksum {checksum:+.6e})")
    if len(rows) == 2:
        speedup = rows["numpy"][0] / rows["numba"][0]
        print(f"  numba speedup over numpy: x{speedup:.2f}")
        agree = abs(rows["numba"][1] - rows["numpy"][1])
        print(f"  checksum |difference|: {agree:.3e}")


def bench_solve(repeats_unused):
    spec = fx.make_spec("example_ii", dimension=1, order=0.5, m=0.5)
    cfg = fx.QuadratureConfig()
    u_star, h = bs.manufacture(spec, n=201, amplitude=0.5, cfg=cfg)
    problem = bs.ProblemSpec(exponent=spec, rhs_mode=bs.MANUFACTURED,
                             h_field=h, domain="ball_1d")
    nodes = u_star.nodes()[:, 0]
    pert = 0.05 * np.sin(3 * nodes) * np.maximum(0.0, 1.0 - nodes ** 2)
    guess = u_star.with_values(np.clip(u_star.values + pert, 0.0, 1.0 - 1e-3))
    print("\nmanufactured solve, 201 nodes, tol 1e-4:")
    for backend in ("numba", "numpy"):
        try:
            fx.set_backend(backend)
        except fx.PreconditionError:
            continue
        t0 = time.perf_counter()
        rep = bs.solve(problem, guess, cfg, tol_res=1e-4, u_star=u_star)
        dt = time.perf_counter() - t0
        err = float(np.max(np.abs(rep.solution.values - u_star.values)))
        print(f"  {backend:6s}: {dt:6.2f}s, {rep.applies} applies, "
              f"sup error {err:.2e}")
    fx.set_backend("auto")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=50)
    args = ap.parse_args()
    print(f"backend available: {fx.get_backend()}")
    bench_dim(1, 401, args.repeats)
    bench_dim(2, 41, max(5, args.repeats // 10), stride=4)
    bench_solve(args.repeats)


if __name__ == "__main__":
    main()
