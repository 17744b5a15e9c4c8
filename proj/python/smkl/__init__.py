"""Sparse multiple kernel learning: SVM over a cardinality-constrained
convex combination of kernels, with conic relaxation certificates."""

from ._smkl import (  # noqa: F401
    CapacityError,
    DualSolution,
    GapReport,
    GlobalOptimum,
    InputError,
    KernelBank,
    KernelSpec,
    NumericalError,
    RelaxationOutcome,
    SmklResult,
    TraceEntry,
    build_bank,
    certify_gap,
    combine_cross,
    decision_values,
    default_kernel_specs,
    extract_warm_start,
    fit,
    global_enumerate,
    gssp_project,
    relaxation_lower_bound,
    solve_dual,
)

__version__ = "0.1.0"
