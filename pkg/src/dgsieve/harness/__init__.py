"""Experiment plumbing: generators, graded reports, matrices, benchmarks."""

from .bench import BenchReport, available_backends, bench_kernels
from .experiment import (SOLVERS, execute_run, expand_matrix, load_config,
                         run_experiment)
from .generators import KINDS, Instance, LatticeSpec, gen_lattice, generate
from .report import (RunReport, Tagged, bound, ground_truth, measured,
                     write_csv, write_jsonl)

__all__ = [
    "BenchReport",
    "Instance",
    "KINDS",
    "LatticeSpec",
    "RunReport",
    "SOLVERS",
    "Tagged",
    "available_backends",
    "bench_kernels",
    "bound",
    "execute_run",
    "expand_matrix",
    "gen_lattice",
    "generate",
    "ground_truth",
    "load_config",
    "measured",
    "run_experiment",
    "write_csv",
    "write_jsonl",
]
