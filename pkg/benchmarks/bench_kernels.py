"""Time the off-diagonal assembly kernels, compiled lane vs reference.

Builds a few representative interaction-sector bases and assembles the
sparse Hamiltonian through both lanes, reporting wall times and the
speedup.  Run from the repository root:

    python3 benchmarks/bench_kernels.py [--repeat N]

The compiled lane is skipped (with a note) when the extension is not
importable in this environment.
"""

import argparse
import time

from fanopdc import multiphoton as mp
from fanopdc._kernels import compiled_available

CASES = (
    ("dc      N=2 m_max=160", dict(N=2, M=0, m_max=160, dc_only=True)),
    ("dc      N=3 m_max=80", dict(N=3, M=0, m_max=80, dc_only=True)),
    ("full    N=2 m_max=48", dict(N=2, M=0, m_max=48, dc_only=False)),
    ("full    N=3 m_max=12", dict(N=3, M=0, m_max=12, dc_only=False)),
)


def _time_build(basis, lane, repeat):
    best = float("inf")
    nnz = 0
    for _ in range(repeat):
        t0 = time.perf_counter()
        ham = mp.build_hamiltonian(basis, 4.0, 0.1, 0.5, 0.05, lane=lane)
        best = min(best, time.perf_counter() - t0)
        nnz = ham.matrix.nnz
    return best, nnz


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3,
                    help="timing repeats per case, best is kept")
    args = ap.parse_args()

    have_cy = compiled_available()
    if not have_cy:
        print("note: compiled extension not importable, "
              "timing the reference lane only")
    print("%-24s %10s %12s %12s %12s %9s"
          % ("case", "dim", "nnz", "python [s]", "cython [s]", "speedup"))
    for label, case in CASES:
        t_enum = time.perf_counter()
        basis = mp.enumerate_basis(case["N"], case["M"], case["m_max"],
                                   dc_only=case["dc_only"])
        t_enum = time.perf_counter() - t_enum
        t_py, nnz = _time_build(basis, "python", args.repeat)
        if have_cy:
            t_cy, _ = _time_build(basis, "cython", args.repeat)
            print("%-24s %10d %12d %12.4f %12.4f %8.1fx"
                  % (label, basis.dim, nnz, t_py, t_cy, t_py / t_cy))
        else:
            print("%-24s %10d %12d %12.4f %12s %9s"
                  % (label, basis.dim, nnz, t_py, "-", "-"))
        print("%-24s %10s enumeration %.3f s" % ("", "", t_enum))


if __name__ == "__main__":
    main()
