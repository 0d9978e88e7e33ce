"""Exact L-series computations for Drinfeld modules and Anderson t-modules over F_q[t]."""
from .gf import field_make
from .apoly import Poly, AZPoly, parse_apoly, monic_primes, charpoly_theta
from .series import InfSeries, ZSeries, padic_field, embed_rational
from .ore import TwistedOp, ore_mul, apply, exp_log, solve_exp, solve_log
from .tmodule import (TModule, module_load, alias, battery, carlitz, carlitz_tensor2,
                      alpha_family, vanishing_family, theta_tau2, torsion_scan, kill_torsion)
from .local_factor import local_factor
from .lseries import (lseries_inf, lseries_padic, unit_polynomial, vanishing_order,
                      extended_log, regulator_rank1, class_formula_check)
from .newton import newton_polygon, smb_from_polygon, ord_bound
from .errors import FFLSError, DomainError, PrecisionError

__all__ = [
    "field_make", "Poly", "AZPoly", "parse_apoly", "monic_primes", "charpoly_theta",
    "InfSeries", "ZSeries", "padic_field", "embed_rational", "TwistedOp", "ore_mul", "apply",
    "exp_log", "solve_exp", "solve_log", "TModule", "module_load", "alias", "battery",
    "carlitz", "carlitz_tensor2", "alpha_family", "vanishing_family", "theta_tau2",
    "torsion_scan", "kill_torsion", "local_factor", "lseries_inf", "lseries_padic",
    "unit_polynomial", "vanishing_order", "extended_log", "regulator_rank1",
    "class_formula_check", "newton_polygon", "smb_from_polygon", "ord_bound", "FFLSError",
    "DomainError", "PrecisionError",
]

__version__ = "0.1.0"
