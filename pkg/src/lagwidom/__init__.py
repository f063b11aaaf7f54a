"""Finite-n correlation kernels of Laguerre-type beta ensembles (beta = 1, 2, 4)
and their hard-edge, soft-edge and bulk universality limits."""

from .weights import Weight, eval_V, eval_V_prime, eval_weight, from_ensemble

__version__ = "0.1.0"

__all__ = ["Weight", "eval_V", "eval_V_prime", "eval_weight", "from_ensemble"]
