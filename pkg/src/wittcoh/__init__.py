"""Exact windowed cohomology of Z-graded Lie algebras.

Everything here computes over the rationals with exact arithmetic: sparse
linear algebra (rank / kernel / affine solve), graded Lie algebras given by
structure constants (Witt, Virasoro, custom), weight-homogeneous cochain
complexes on finite index windows, windowed H^q computations, a symbolic
replay of the diagonal-recurrence argument that kills H^2_0(W;W), and
order-by-order formal deformations over truncated polynomial bases.
"""

from .linalg import LinearSolution, Scalar, SparseMatrix, kernel_basis, rank, solve, solve_affine
from .algebra import (
    CENTRAL,
    Element,
    GradedLieAlgebra,
    Window,
    check_jacobi,
    dump_algebra,
    load_algebra,
    make_virasoro,
    make_witt,
)
from .cochains import (
    ADJOINT,
    TRIVIAL,
    Cochain,
    CochainBasis,
    MixedCochain,
    differential,
    trivial_coefficient_differential,
    weight_components,
)
from .cohomology import (
    CohomologyReport,
    central_extension_dim,
    coboundary_primitive,
    cohomology_dim,
    normalize_weight_zero,
    reduce_to_weight_zero,
    stability_scan,
)
from .replay import (
    FactTable,
    RelationSet,
    SymbolicValue,
    Verdict,
    diagonal_relations,
    emit_table,
    fill_nonpositive_rows,
    fill_positive_rows,
    final_solve,
    init_table,
    k2_specializations,
    run_replay,
)
from .deformation import (
    DefectReport,
    DeformedBracket,
    Equivalence,
    TruncatedBase,
    conjugate,
    infinitesimal,
    jacobi_defect,
    parse_deformation,
    render_deformation,
    trivialize,
)

__version__ = "0.1.0"
