import os

from dotenv import load_dotenv

load_dotenv()


def _get_float(name: str, default: float) -> float:
    return float(os.getenv(name, str(default)))


def _get_int(name: str, default: int) -> int:
    return int(os.getenv(name, str(default)))


# Krylov
PCG_RTOL = _get_float("BDDC_PCG_RTOL", 1e-10)
PCG_MAXIT = _get_int("BDDC_PCG_MAXIT", 1000)

# Dense kernels
PINV_REL_TOL = _get_float("BDDC_PINV_REL_TOL", 1e-12)
EIG_INF_TOL = _get_float("BDDC_EIG_INF_TOL", 1e-12)
FORM_TOL = _get_float("BDDC_FORM_TOL", 1e-8)
SPECTRUM_CAP = _get_int("BDDC_SPECTRUM_CAP", 3000)

# Projector preconditioner
GRAM_COND_WARN = _get_float("BDDC_GRAM_COND_WARN", 1e12)

# Economic (slab) eigenproblems: "neumann" or "dirichlet" on the cut side
SLAB_CUT = os.getenv("BDDC_SLAB_CUT", "neumann").lower()

# Global Dirichlet nodes in condensed blocks: "free" (eliminated like any other node) or "fixed" at zero
CONDENSED_BOUNDARY = os.getenv("BDDC_CONDENSED_BOUNDARY", "free").lower()

# Coefficient patterns
FRACTURE_BRANCHES = _get_int("BDDC_FRACTURE_BRANCHES", 3)

# Thread pool for per-subdomain and per-class work
WORKERS = _get_int("BDDC_WORKERS", os.cpu_count() or 1)

# Persistence is off unless a URL is configured
DATABASE_URL = os.getenv("BDDC_DATABASE_URL") or None

LOG_LEVEL = os.getenv("BDDC_LOG_LEVEL", "INFO").upper()
