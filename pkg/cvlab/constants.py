#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : CV Lab                                                                              #
# Version    : 0.1.0                                                                               #
# Python     : 3.13.5                                                                              #
# Filename   : constants.py                                                                        #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : https://github.com/john-james-ai/cv-lab/                                            #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 18th 2026 04:12:09 pm                                                #
# Modified   : Sunday October 18th 2026 11:47:02 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
from __future__ import annotations

# ------------------------------------------------------------------------------------------------ #
DEFAULT_JSON_INDENT = 2
DEFAULT_THREADS = 1
DEFAULT_SEED = 0

# --- algebra ------------------------------------------------------------------------------------ #
# Dense realization cap. A request above it is a desk-scale refusal, not a tuning knob.
DEFAULT_MAX_DIM = 4096

# --- focksim ------------------------------------------------------------------------------------ #
DEFAULT_EXPM_TOL = 1e-12
# Above this dimension the exponential is applied to the vector through a Krylov action
# instead of being formed.
DEFAULT_KRYLOV_DIM = 4096
DEFAULT_MAX_AMPLITUDES = 2**24
DEFAULT_MAX_CUTOFF = 128
# Cap for the energy-growth verifiers, whose density-matrix runs stay dense.
DEFAULT_GROWTH_MAX_CUTOFF = 512
# First box tried by the adaptive truncation when the Hamiltonian moves photons.
DEFAULT_MIN_CUTOFF = 8
DEFAULT_LEAKAGE_ORDER = 8
DEFAULT_UNITARITY_TOL = 1e-8
# Uniform grid used to project wavefunctions onto Hermite functions.
DEFAULT_GRID_POINTS = 1201

# --- gausssim ----------------------------------------------------------------------------------- #
DEFAULT_COND_GUARD = 1e12
DEFAULT_PURITY_TOL = 1e-8
DEFAULT_SYMPLECTIC_TOL = 1e-10

# --- grank -------------------------------------------------------------------------------------- #
DEFAULT_MAX_THETA = 4.0
DEFAULT_MAX_TERMS = 200_000
DEFAULT_TENSOR_CAP = 1_000_000
# Terms whose magnitude relative to the largest falls below this are dropped.
DEFAULT_PRUNE_FLOOR = 1e-18

# --- gadget ------------------------------------------------------------------------------------- #
DEFAULT_XI_CONSTANT = 8.0
DEFAULT_BRANCH_FLOOR = 1e-14

# --- pathsum ------------------------------------------------------------------------------------ #
DEFAULT_BRANCH_CAP = 10**7
DEFAULT_MAX_OBS_DEGREE = 16
DEFAULT_BATCH_SIZE = 65_536
# Ancilla width used by the path sum; the rank of each magic state grows like xi^2.
DEFAULT_PATHSUM_XI = 2.0

# --- energetics --------------------------------------------------------------------------------- #
DEFAULT_DISSIPATION_CONSTANT = 1.0
# Doubling the cutoff must move <N> by less than this for an energy to count as converged.
DEFAULT_CONVERGENCE_RTOL = 0.01
DEFAULT_DIVERGENCE_WITNESS = 1e6
DEFAULT_MAX_SERIES_TERMS = 100_000
# Fitted c in the 2^(c s d 2^d) envelope for cubic circuits of depth d on s modes.
DEFAULT_ENVELOPE_CONSTANT = 2.0

# --- adiabatic ---------------------------------------------------------------------------------- #
DEFAULT_ADIABATIC_CAP = 4096
DEFAULT_ADIABATIC_STEPS = 4000
DEFAULT_WHISKER_POWER = 1
DEFAULT_ADIABATIC_TAU = 1e4
# Relative residual allowed for A(t) applied to its closed-form ground state.
DEFAULT_KERNEL_TOL = 1e-10
DEFAULT_GAP_POINTS = 11
# Output squeezing time; a solution leaves about sinh^2(6) photons in the output mode.
DEFAULT_OUTPUT_TIME = 6.0

# --- files -------------------------------------------------------------------------------------- #
CIRCUIT_FORMAT = "cvlab-circuit"
CIRCUIT_VERSION = 1
SWEEP_HEADER = "# cvlab-sweep v1"
INSTANCE_FORMAT = "cvlab-instance"
NDJSON_SUFFIX = ".ndjson"

# --- cli ---------------------------------------------------------------------------------------- #
DEFAULT_SOURCE = "cvlab"
DEFAULT_FILE_LOCATION = "results"
DEFAULT_LOG_FILEPATH = "logs/cvlab.log"
