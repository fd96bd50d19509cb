"""Entanglement dynamics of quartic anharmonic oscillators in truncated Fock spaces."""
__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    GridTooNarrowError,
    IntegrationError,
    InvalidDimensionError,
    LabelError,
    OscnlError,
    PhysicalityError,
    SchemaError,
    TruncationError,
)
from .hilbert import (  # noqa: E402
    CompositeSpace,
    DensityMatrix,
    ModeSpec,
    Operator,
    StateVector,
    annihilation,
    coherent_state,
    embed,
    fock_state,
    partial_trace,
    partial_transpose,
    tensor,
    thermal_mixture,
)
from .models import (  # noqa: E402
    OptomechParams,
    TripartiteParams,
    build_lindblad_ops,
    build_optomech_hamiltonian,
    build_transformed_optomech,
    build_tripartite_hamiltonian,
)
from .dynamics import TimeGrid, Trajectory, evolve_lindblad, evolve_unitary, steady_state_probe  # noqa: E402
from .quantify import (  # noqa: E402
    WignerGrid,
    log_negativity,
    negativity,
    purity,
    quadrature_variances,
    wigner,
)
from .analytic import (  # noqa: E402
    MirrorJointState,
    evolution_operator,
    mirror_joint_state,
    mirror_reduced_density,
    one_excitation_amplitudes,
)
from .coil import CoilParams, beta_strength, quartic_field_coefficient  # noqa: E402
