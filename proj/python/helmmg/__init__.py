"""Geometric multigrid for the 2D Helmholtz equation with CSL coarsening."""

from ._core import (
    HelmmgError,
    assemble,
    certify,
    nodes_for_wavenumber,
    presets,
    prolongation_1d,
    rhs,
    solve,
    solver_nodes_for_wavenumber,
    wavenumber_field,
)

__all__ = [
    "HelmmgError",
    "assemble",
    "assemble_sparse",
    "certify",
    "nodes_for_wavenumber",
    "presets",
    "prolongation_1d",
    "rhs",
    "solve",
    "solver_nodes_for_wavenumber",
    "wavenumber_field",
]


def assemble_sparse(**kwargs):
    """Same arguments as assemble(); returns a scipy.sparse.csr_matrix."""
    import scipy.sparse

    indptr, indices, data, shape = assemble(**kwargs)
    return scipy.sparse.csr_matrix((data, indices, indptr), shape=shape)
