import importlib.util
from pathlib import Path


def test_kernel_benchmark_runs():
    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernel.py"
    spec = importlib.util.spec_from_file_location("bench_kernel", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    (row,) = mod.bench(seeds=1, repeat=1, person_target=30)
    assert row["facts"] == 210 and row["closure_python_ms"] > 0
