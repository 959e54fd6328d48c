"""
Security dimensioning
=====================

With every primitive polynomial of degrees g_min..g_max in play, the key
space fixes the optimal key length, the number of reseeds for a flow, the
brute force time and the storage for the polynomials. For a fixed bank of
P registers the boundary gives the smallest degree meeting a target time.
"""

from olfsr.analysis import ThreatParams, boundary_min_g, case_study_csv, run_case_study

threat = ThreatParams()  # 1.25e9-bit flow, 1e-18 s per guess, 1e13-year target

# Case 1: g_min fixed at 10, g_max grows.
print(case_study_csv("C1", run_case_study("C1", [20, 30, 37, 45], threat)))

# Case 2: g_max fixed at 45, g_min grows; the key length stays at 84 bits.
print(case_study_csv("C2", run_case_study("C2", [10, 20, 30, 44], threat)))

# Fixed banks: three registers reseeded every 8g bits, or two every 5g bits.
for P, n in [(3, 8), (2, 5)]:
    g = boundary_min_g(P, n, threat)
    print(f"P={P}, n={n}: g >= {g}, key bits per reseed {n * g}")
