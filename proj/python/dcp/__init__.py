"""P1 finite elements for quasilinear problems with monotonicity certificates."""

from ._core import (
    ConfigError,
    DataBounds,
    Mesh,
    MeshError,
    Problem,
    SolveError,
    analyze,
    assemble,
    boundary_distance,
    certify,
    compare,
    epsilon_sequence,
    gen_structured,
    load_mesh,
    monotone_oracle,
    run_certify,
    solve,
    strict_dominance_margins,
    write_mesh,
)

__all__ = [
    "ConfigError",
    "DataBounds",
    "Mesh",
    "MeshError",
    "Problem",
    "SolveError",
    "analyze",
    "assemble",
    "boundary_distance",
    "certify",
    "compare",
    "epsilon_sequence",
    "gen_structured",
    "load_mesh",
    "monotone_oracle",
    "run_certify",
    "solve",
    "strict_dominance_margins",
    "write_mesh",
]
