"""Hyper-systolic matrix multiplication on a simulated 1D processor ring."""
from .algorithms import (HsParams, RunReport, brute_force_reduce, complexity_counts, hyper_systolic_matmul,
                         pairwise_reduce, systolic_matmul)
from .bases import (BasisPair, MultiplicityTable, StrideBasis, cannon_shift_count, gain_factor_matmul,
                    gain_factor_two_arrays, h_range_complete, optimal_basis_search, regular_bases,
                    regular_two_array_bases)
from .dense import approx_equal, naive_multiply, read_matrix, write_matrix
from .errors import (BasisError, DomainError, HyperSystolicError, LayoutError, MappingError, RegistryError,
                     SearchExhaustedError, ShapeError)
from .layouts import DistributedMatrix, LayoutTag, preshift_B, skew_columns, unpreshift_B, unskew_columns
from .mapping import block_cyclic_multiply, block_multiply, cyclic_multiply
from .ring import CostModel, RingMachine, ShiftLog
from .torus import cannon_matmul, semi_hyper_systolic_2d, semi_systolic_2d

__version__ = "0.1.0"
