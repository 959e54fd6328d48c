"""Emulation and cryptanalysis of a reseeded parallel-LFSR stream cipher."""

from .analysis import (
    KeyspaceSpec,
    SecurityReport,
    ThreatParams,
    bfa_time,
    boundary_min_g,
    keyspace_size,
    min_degree_bound,
    optimal_key_length,
    reseed_count,
    run_case_study,
    storage_bits,
)
from .attack import BfaResult, BmResult, berlekamp_massey, brute_force_attack, linear_complexity_profile, splice_complexity
from .cipher import CipherUnit, SessionParams, decrypt_session, deinterleave, encrypt_session, interleave, xor_encrypt
from .gf2poly import (
    FactoredInt,
    GenPoly,
    all_primitive,
    count_primitive,
    enumerate_primitive,
    euler_phi,
    factor,
    is_irreducible,
    is_primitive,
    poly_mod_mul,
)
from .keygen import LfsrState, OkgConfig, SyncRng, keystream, lfsr_bits, lfsr_period, lfsr_step, next_selection, replay

__version__ = "0.1.0"
