"""Security dimensioning for reseeded parallel-LFSR key generation.

Quantities (all lengths in bits):

* keyspace: number of (polynomial, seed) pairs the attacker must consider,
  ``P * (2^g - 1)`` for a fixed bank or the sum of that over every degree of
  a range when all primitive polynomials of those degrees are in play;
* optimal key length ``L_k = floor(log2(keyspace))``, the longest key that
  guessing the generator parameters cannot beat;
* reseed count ``N = ceil(L_M / L_k)``;
* brute force time ``N * tau * keyspace``;
* storage ``P * (g + 1)`` bits for the polynomials.

Exact integers are used throughout the counting; the time figures are
carried in the log2 domain so they stay finite for large degrees.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .gf2poly import EXACT_DEGREE_LIMIT, count_primitive

YEAR_SECONDS = 3.1557e7
BYTES_PER_GB = 1e9
MAX_BOUNDARY_DEGREE = 4096

# Values used for the OTN-sized flow in the reference scenarios.
OTN_FLOW_BITS = 1.25e9
AURORA_TAU = 1e-18
AES128_BFA_YEARS = 1e13

# Descriptive only; nothing is computed from these rates.
C_RNG_MAX = 1.3e9
C_OKG_MAX = 250e9
XOR_LINE_RATE = 160e9


class UnsatisfiableError(ValueError):
    pass


@dataclass(frozen=True)
class ThreatParams:
    L_M: float = OTN_FLOW_BITS
    tau: float = AURORA_TAU
    T_target: float = AES128_BFA_YEARS * YEAR_SECONDS
    year_seconds: float = YEAR_SECONDS

    def __post_init__(self):
        for name in ("L_M", "tau", "T_target", "year_seconds"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def with_years(cls, years: float, **kw) -> ThreatParams:
        ys = kw.get("year_seconds", YEAR_SECONDS)
        return cls(T_target=years * ys, **kw)


@dataclass(frozen=True)
class KeyspaceSpec:
    """Either every primitive polynomial of degrees ``g_min..g_max``,
    or a fixed bank of ``P`` polynomials of degree ``g`` with ``L_k = n * g``."""

    mode: str
    g_min: int | None = None
    g_max: int | None = None
    P: int | None = None
    g: int | None = None
    n: int | None = None

    def __post_init__(self):
        if self.mode == "range":
            if not (1 <= self.g_min <= self.g_max <= EXACT_DEGREE_LIMIT):
                raise ValueError(
                    f"range mode needs 1 <= g_min <= g_max <= {EXACT_DEGREE_LIMIT}, "
                    f"got [{self.g_min}, {self.g_max}]"
                )
        elif self.mode == "fixed":
            if self.P is None or self.P < 1 or self.g is None or self.g < 1:
                raise ValueError("fixed mode needs P >= 1 and g >= 1")
            if self.n is not None and not 1 <= self.n <= ((1 << self.g) - 1) // self.g:
                raise ValueError(f"n must lie in [1, (2^g - 1)/g] for g={self.g}")
        else:
            raise ValueError(f"unknown keyspace mode {self.mode!r}")

    @classmethod
    def degree_range(cls, g_min: int, g_max: int) -> KeyspaceSpec:
        return cls("range", g_min=g_min, g_max=g_max)

    @classmethod
    def fixed(cls, P: int, g: int, n: int | None = None) -> KeyspaceSpec:
        return cls("fixed", P=P, g=g, n=n)

    def degrees(self) -> range:
        if self.mode == "range":
            return range(self.g_min, self.g_max + 1)
        return range(self.g, self.g + 1)

    def polys_of_degree(self, g: int) -> int:
        return count_primitive(g) if self.mode == "range" else self.P


@dataclass(frozen=True)
class SecurityReport:
    g_min: int
    g_max: int
    keyspace_log2: float
    L_k_opt: int
    N: int
    T_bfa: float
    T_bfa_years: float
    storage_bits: int
    g_min_bound: int

    @property
    def storage_GB(self) -> float:
        return self.storage_bits / 8 / BYTES_PER_GB

    def to_dict(self) -> dict:
        d = asdict(self)
        d["storage_GB"] = self.storage_GB
        return d


@lru_cache(maxsize=None)
def _range_keyspace(g_min: int, g_max: int) -> int:
    return sum(count_primitive(g) * ((1 << g) - 1) for g in range(g_min, g_max + 1))


def keyspace_size(spec: KeyspaceSpec) -> int:
    """Exact number of (polynomial, seed) pairs."""
    if spec.mode == "range":
        return _range_keyspace(spec.g_min, spec.g_max)
    return spec.P * ((1 << spec.g) - 1)


def log2_int(x: int) -> float:
    """``log2`` of a positive integer of any size, to double precision."""
    if x <= 0:
        raise ValueError("log2 of a non-positive number")
    shift = max(x.bit_length() - 64, 0)
    return math.log2(x >> shift) + shift


def keyspace_log2(spec: KeyspaceSpec) -> float:
    return log2_int(keyspace_size(spec))


def optimal_key_length(spec: KeyspaceSpec) -> int:
    """Largest ``L_k`` with ``log2(keyspace) >= L_k``."""
    return keyspace_size(spec).bit_length() - 1


def entropy_generator_params(P: int, g: int) -> float:
    """Equivocation when guessing the polynomial and seed: ``log2(P (2^g - 1))``."""
    return log2_int(P * ((1 << g) - 1))


def parameter_guess_is_faster(P: int, g: int, key_len: int) -> bool:
    """True when ``P (2^g - 1) < 2^key_len``, i.e. guessing the generator beats guessing the key."""
    return P * ((1 << g) - 1) < (1 << key_len)


def perfect_secrecy_holds(P: int, g: int, key_len: int) -> bool:
    return not parameter_guess_is_faster(P, g, key_len)


def reseed_count(L_M, L_k: int) -> int:
    """``ceil(L_M / L_k)``; ``L_M`` may be a float for flow sizes like 1.25e9."""
    if L_M <= 0 or L_k <= 0:
        raise ValueError("L_M and L_k must be positive")
    L_M = int(L_M) if float(L_M).is_integer() else L_M
    if isinstance(L_M, int):
        return -(-L_M // L_k)
    return math.ceil(L_M / L_k)


def bfa_time_log2(spec: KeyspaceSpec, threat: ThreatParams) -> float:
    N = reseed_count(threat.L_M, optimal_key_length(spec))
    return math.log2(N) + math.log2(threat.tau) + keyspace_log2(spec)


def bfa_time(spec: KeyspaceSpec, threat: ThreatParams) -> float:
    """Brute force duration ``N * tau * keyspace`` in seconds (inf on overflow)."""
    try:
        return 2.0 ** bfa_time_log2(spec, threat)
    except OverflowError:
        return math.inf


def storage_bits(spec: KeyspaceSpec) -> int:
    return sum(spec.polys_of_degree(g) * (g + 1) for g in spec.degrees())


def min_degree_bound(L_M, N: int) -> int:
    """Smallest degree whose period ``2^g - 1`` covers one unit of ``L_M / N`` bits."""
    if L_M <= 0 or N <= 0:
        raise ValueError("L_M and N must be positive")
    return math.ceil(math.log2(L_M / N + 1))


def security_report(spec: KeyspaceSpec, threat: ThreatParams) -> SecurityReport:
    L_k = optimal_key_length(spec)
    N = reseed_count(threat.L_M, L_k)
    T = bfa_time(spec, threat)
    degrees = spec.degrees()
    return SecurityReport(
        g_min=degrees.start,
        g_max=degrees.stop - 1,
        keyspace_log2=keyspace_log2(spec),
        L_k_opt=L_k,
        N=N,
        T_bfa=T,
        T_bfa_years=T / threat.year_seconds,
        storage_bits=storage_bits(spec),
        g_min_bound=min_degree_bound(threat.L_M, N),
    )


# ---------------------------------------------------------------------------
# Fixed-bank boundary: smallest degree for a target brute-force time
# ---------------------------------------------------------------------------


def _boundary_lhs_log2(P: int, n: int, threat: ThreatParams) -> float:
    return math.log2(n) + math.log2(threat.T_target) - math.log2(threat.tau) - math.log2(threat.L_M) - math.log2(P)


def _seeds_per_degree_log2(g: int) -> float:
    return log2_int((1 << g) - 1) - math.log2(g)


def boundary_holds(g: int, P: int, n: int, threat: ThreatParams, rtol: float = 1e-12) -> bool:
    """``n * T / (tau * L_M * P) <= (2^g - 1) / g`` (log2 domain, relative slack ``rtol``)."""
    lhs = _boundary_lhs_log2(P, n, threat)
    rhs = _seeds_per_degree_log2(g)
    return lhs <= rhs + rtol * max(1.0, abs(rhs))


def boundary_min_g(P: int, n: int, threat: ThreatParams) -> int:
    """Smallest degree meeting the brute-force target with ``P`` registers and ``L_k = n g``.

    The returned degree also satisfies ``n <= (2^g - 1) / g``.
    """
    if P < 2:
        raise ValueError("the bank needs P >= 2 registers")
    if n < 1:
        raise ValueError("n must be >= 1")
    for g in range(1, MAX_BOUNDARY_DEGREE + 1):
        if boundary_holds(g, P, n, threat) and n <= ((1 << g) - 1) // g:
            return g
    raise UnsatisfiableError(
        f"no degree <= {MAX_BOUNDARY_DEGREE} satisfies the boundary for P={P}, n={n}"
    )


def boundary_table(Ps: Iterable[int], ns: Iterable[int], threat: ThreatParams) -> list[tuple[int, int, int]]:
    ns = list(ns)
    return [(P, n, boundary_min_g(P, n, threat)) for P in Ps for n in ns]


# ---------------------------------------------------------------------------
# Case studies
# ---------------------------------------------------------------------------

C1_G_MIN = 10
C2_G_MAX = 45


def run_case_study(case: str, sweep: Iterable[int], threat: ThreatParams | None = None) -> list[SecurityReport]:
    """C1 sweeps ``g_max`` with ``g_min = 10``; C2 sweeps ``g_min`` with ``g_max = 45``."""
    threat = threat or ThreatParams()
    case = case.upper()
    rows = []
    for value in sweep:
        if case == "C1":
            spec = KeyspaceSpec.degree_range(C1_G_MIN, value)
        elif case == "C2":
            spec = KeyspaceSpec.degree_range(value, C2_G_MAX)
        else:
            raise ValueError(f"unknown case {case!r}; expected C1 or C2")
        rows.append(security_report(spec, threat))
    return rows


def case_sweep_variable(case: str, report: SecurityReport) -> int:
    return report.g_max if case.upper() == "C1" else report.g_min


def case_study_csv(case: str, rows: Sequence[SecurityReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["g", "L_k", "N", "T_bfa_years", "storage_GB"])
    for r in rows:
        writer.writerow([case_sweep_variable(case, r), r.L_k_opt, r.N, f"{r.T_bfa_years:.6g}", f"{r.storage_GB:.6g}"])
    return buf.getvalue()


def boundary_csv(rows: Iterable[tuple[int, int, int]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["P", "n", "g_min"])
    writer.writerows(rows)
    return buf.getvalue()
