"""Sparse subspace clustering with noise: self-expression solvers, similarity
graphs, subspace merging, recovery diagnostics and synthetic benchmarks."""
from .datagen import (Dataset, add_noise, gen_nh, gen_prop1, gen_semirandom,
                      gen_simplex_degenerate, normalize_columns)
from .diagnostics import (DiagnosticsReport, check_theorem2_conditions, cluster_inradius,
                          dual_direction_check, inradius, lambda_range, restricted_eigenvalue,
                          verify_support_bound)
from .errors import (BudgetExceeded, DegenerateInput, DimensionMismatch, Infeasible,
                     InsufficientComponents, InvalidParameter, SolverDiverged, SolverError,
                     SSCError, StructureInconsistent, ValidationError)
from .experiment import ExperimentConfig, ExperimentReport, run_experiment
from .geometry import (Subspace, affinity, angular_distance, canonical_angles,
                       orthonormal_basis, wedin_subspace_bound)
from .graph import (SimilarityGraph, connected_components, relative_violation, sep_holds,
                    symmetrize)
from .metrics import accuracy
from .pipeline import (RecoveredStructure, cluster_noiseless, cluster_noisy, l0_cluster,
                       merge_subspaces, minimal_structure, validate_minimal_structure)
from .solvers import (CoefficientMatrix, basis_pursuit, kkt_residual, l0_min, lasso,
                      self_expression_matrix)
from .spectral import ClusterAssignment, spectral_cluster

__version__ = "0.1.0"
