"""Compare the compiled series kernels with the NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--json]

Times the three kernels (truncated product, power table used by composition,
monomial evaluation) on the jet shapes the pipeline uses, and checks that
both backends return the same numbers.
"""

from __future__ import annotations

import argparse
import json
import timeit

import numpy as np

from endoconj import _kernels_py
from endoconj.jets import basis

try:
    from endoconj import _kernels
except ImportError:  # pragma: no cover - depends on the build
    _kernels = None

SHAPES = [(1, 8), (2, 8), (3, 8), (3, 12)]


def _cases(n, d, rng):
    b = basis(n, d)
    a = rng.standard_normal(b.size) + 1j * rng.standard_normal(b.size)
    c = rng.standard_normal(b.size) + 1j * rng.standard_normal(b.size)
    g = rng.standard_normal((n, b.size)) + 1j * rng.standard_normal((n, b.size))
    g[:, 0] = 0
    pts = 0.1 * (rng.standard_normal((1000, n)) + 1j * rng.standard_normal((1000, n)))
    return {
        "mul_trunc": lambda m: m.mul_trunc(a, c, b.ti, b.tj, b.tk, b.size),
        "power_table": lambda m: m.power_table(g, b.parent, b.var, b.ti, b.tj, b.tk, b.size),
        "eval_monomials": lambda m: m.eval_monomials(pts, b.parent, b.var),
    }


def _best(fn, repeat):
    number = max(1, int(0.05 / max(timeit.timeit(fn, number=1), 1e-7)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def run(repeat: int = 5) -> list[dict]:
    rng = np.random.default_rng(0)
    rows = []
    for n, d in SHAPES:
        for name, call in _cases(n, d, rng).items():
            py = _best(lambda: call(_kernels_py), repeat)
            row = {"kernel": name, "n": n, "degree": d, "python_s": py}
            if _kernels is not None:
                cy = _best(lambda: call(_kernels), repeat)
                agree = np.allclose(call(_kernels), call(_kernels_py), rtol=1e-12, atol=1e-12)
                row.update(cython_s=cy, speedup=py / cy, agree=bool(agree))
            rows.append(row)
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args()
    rows = run(args.repeat)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'kernel':<15}{'n':>3}{'d':>4}{'numpy [us]':>13}{'cython [us]':>13}{'speedup':>9}  agree")
    for r in rows:
        cy = f"{1e6 * r['cython_s']:13.1f}" if "cython_s" in r else f"{'n/a':>13}"
        sp = f"{r['speedup']:9.1f}" if "speedup" in r else f"{'':>9}"
        print(f"{r['kernel']:<15}{r['n']:>3}{r['degree']:>4}{1e6 * r['python_s']:13.1f}{cy}{sp}  {r.get('agree', '')}")


if __name__ == "__main__":
    main()
