"""latcover: exact SVP, CVP, lattice enumeration, and integer-programming
feasibility in general (semi-)norms via ellipsoid coverings, with
brute-force oracles for desk-scale verification."""

from .bodies import (BodyOracle, CenteringCertificate, EllipsoidBody, LpBall,
                     PolytopeBody)
from .bruteforce import BruteForceBudget, brute_cvp, brute_enum, brute_svp
from .ellipsoid import (Ellipsoid, Parallelepiped, ball, cholesky,
                        ellipsoid_volume, inscribed_parallelepiped,
                        polar_ellipsoid)
from .ip import FlatnessConfig, IPInstance, IPResult, ip_feasible
from .lattice import LatticeBasis, lll_reduce
from .mellip import (CoverBudget, Covering, MEllipsoidConfig, MEllipsoidResult,
                     build_cover, covering_for_body, lp_m_ellipsoid,
                     m_ellipsoid)
from .sampling import (LogconcaveDensity, MomentEstimate, RngState,
                       estimate_moments, hit_and_run_sample)
from .solvers import (CountReport, EnumRequest, SolveReport, closest_vectors,
                      count_G, lattice_enum, shortest_vectors)
from .voronoi import (EnumCap, InnerProduct, VoronoiData, cvp_ellip,
                      ellipsoid_enum, fincke_pohst_enum, relevant_vectors,
                      successive_minima, svp_ellip)

__version__ = "0.1.0"

__all__ = [
    "BodyOracle", "CenteringCertificate", "EllipsoidBody", "LpBall",
    "PolytopeBody", "BruteForceBudget", "brute_cvp", "brute_enum", "brute_svp",
    "Ellipsoid", "Parallelepiped", "ball", "cholesky", "ellipsoid_volume",
    "inscribed_parallelepiped", "polar_ellipsoid", "FlatnessConfig",
    "IPInstance", "IPResult", "ip_feasible", "LatticeBasis", "lll_reduce",
    "CoverBudget", "Covering", "MEllipsoidConfig", "MEllipsoidResult",
    "build_cover", "covering_for_body", "lp_m_ellipsoid", "m_ellipsoid",
    "LogconcaveDensity", "MomentEstimate", "RngState", "estimate_moments",
    "hit_and_run_sample", "CountReport", "EnumRequest", "SolveReport",
    "closest_vectors", "count_G", "lattice_enum", "shortest_vectors",
    "EnumCap", "InnerProduct", "VoronoiData", "cvp_ellip", "ellipsoid_enum",
    "fincke_pohst_enum", "relevant_vectors", "successive_minima", "svp_ellip",
]
