"""Hard-core fermion Hamiltonians, independence-complex Laplacians and the
perturbative gadgets that compile XZ Hamiltonians into them."""

from .errors import (
    ConsistencyError,
    HardcoreError,
    LayoutError,
    NumericalError,
    ParseError,
    PreconditionError,
    SizeError,
    TargetError,
    UnsupportedCouplingError,
)
from .fock import FockBasis, apply_annihilation, apply_creation, apply_hop, enumerate_basis
from .graph import (
    ConstraintGraph,
    GadgetLayout,
    build_gadget_graph,
    build_interaction_graph,
    build_triangle_graph,
    complement_graph,
    max_weight_independent_set,
)
from .operators import (
    PauliSum,
    SparseHermitian,
    assemble_hopping,
    assemble_number_weighted,
    assemble_projector_term,
    min_eigenvalue,
    pauli_decompose,
)
from .complex import betti, boundary_operator, build_susy_hamiltonian, laplacian, supercharge
from .gadgets import (
    GadgetInstance,
    SimulationReport,
    compile_target,
    encode_qubit,
    build_perturbation,
    sw_first_order,
    sw_second_order,
    verify_simulation,
    xz_target,
)

__version__ = "0.1.0"
