"""Time the compiled kernels against the pure-Python reference.

Usage: ``python3 benchmarks/bench_kernels.py [--repeat N]``

Three workloads are timed for each backend:

* direct calls to the optimizer objective ``inverse_purity``
* one adaptive quadrature of the displacement moment over a resonant peak
* the full oracle on a small random suite, run in a child process so the
  backend switch (``SPRINGCOOL_PURE_PYTHON``) takes effect at import time
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

from scipy import integrate

from springcool import _kernels_py

try:
    from springcool import _kernels as _compiled
except ImportError:  # pragma: no cover - only without a build
    _compiled = None

OBJECTIVE_ARGS = (1e6, 1e10, 1.0, 60.0, 0.8, 1e6, 0.4, 1.2, 5.0, 400.0, 30.0)
MOMENT_ARGS = (1.0, 1e-4, 3.0, 1.0, 50.0, 1e-2, 1.0, 0.2, 0)

SUITE_SNIPPET = (
    "import time; from springcool.oracle.compare import verify_suite; "
    "t = time.perf_counter(); verify_suite(30, seed=1); print(time.perf_counter() - t)"
)


def _objective(mod, n):
    f = mod.inverse_purity
    return timeit.timeit(lambda: f(*OBJECTIVE_ARGS), number=n) / n


def _quad(integrand, n):
    def once():
        integrate.quad(integrand, 0.0, 1e3, args=MOMENT_ARGS, points=[1.0], limit=500, epsabs=0.0, epsrel=1e-10)

    return timeit.timeit(once, number=n) / n


def _quad_llc(llc, n):
    # The low-level signature carries the centre offset as a trailing argument.
    def once():
        integrate.quad(llc, 0.0, 1e3, args=MOMENT_ARGS + (0.0,), points=[1.0], limit=500, epsabs=0.0, epsrel=1e-10)

    return timeit.timeit(once, number=n) / n


def _suite(pure):
    env = dict(os.environ)
    env["SPRINGCOOL_PURE_PYTHON"] = "1" if pure else "0"
    out = subprocess.run([sys.executable, "-c", SUITE_SNIPPET], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20000, help="objective calls per backend")
    args = parser.parse_args(argv)
    rows = [("objective call", _objective(_kernels_py, args.repeat), None),
            ("moment quadrature", _quad(_kernels_py.sxx_moment, 20), None),
            ("oracle suite (30 configs)", _suite(True), None)]
    if _compiled is not None:
        from scipy import LowLevelCallable

        llc = LowLevelCallable.from_cython(_compiled, "sxx_moment_llc")
        llc_quad = _quad_llc(llc, 20)
        rows = [
            (rows[0][0], rows[0][1], _objective(_compiled, args.repeat)),
            (rows[1][0], rows[1][1], llc_quad),
            (rows[2][0], rows[2][1], _suite(False)),
        ]
    print(f"{'workload':28s} {'python [s]':>12s} {'cython [s]':>12s} {'speedup':>8s}")
    for name, py, cy in rows:
        cy_txt = f"{cy:12.3e}" if cy is not None else f"{'n/a':>12s}"
        speed = f"{py / cy:8.1f}" if cy else f"{'n/a':>8s}"
        print(f"{name:28s} {py:12.3e} {cy_txt} {speed}")


if __name__ == "__main__":
    main()
