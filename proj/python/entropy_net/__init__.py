"""Entropy-residual neural network training for scalar conservation laws."""

from entropy_net._core import (  # noqa: F401
    BenchmarkProblem,
    ClippedTanhNet,
    FluxModel,
    QuadGrid,
    __version__,
    exact_solution,
    flux_catalog_names,
    hat_compile_trace,
    init_network,
    load_network,
    make_flux,
    make_problem,
    problem_names,
    psi_tau,
    save_network,
    smooth_max,
    smooth_min,
    solve_reference,
    train_from_json,
    weno5_reconstruct,
)
