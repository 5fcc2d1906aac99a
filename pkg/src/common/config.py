from pathlib import Path
import os
from dotenv import load_dotenv
load_dotenv()

BASE_DIR = Path(__file__).resolve().parent.parent.parent

class Settings:
    QUAD_ABS_TOL: float = float(os.getenv("FRACINEQ_QUAD_TOL", "1e-10"))
    QUAD_REL_TOL: float = float(os.getenv("FRACINEQ_QUAD_REL_TOL", "1e-8"))
    MAX_SUBDIVISIONS: int = int(os.getenv("FRACINEQ_MAX_SUBDIVISIONS", "2000"))
    CERT_GRID: int = int(os.getenv("FRACINEQ_CERT_GRID", "9"))
    WORKERS: int = int(os.getenv("FRACINEQ_WORKERS", "1"))
    SEED: int = int(os.getenv("FRACINEQ_SEED", "42"))
    # certification slack, audit and bound classification tolerances
    CERT_TOL: float = 1e-12
    AUDIT_REL_TOL: float = 1e-8
    BOUND_REL_TOL: float = 1e-9

settings = Settings()

__all__ = ["settings", "BASE_DIR"]
