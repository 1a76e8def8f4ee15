import os
from dotenv import load_dotenv

load_dotenv()

class Config:
    # Integrator defaults
    REL_TOL = float(os.getenv("RESONANCE_REL_TOL", "1e-10"))
    ABS_TOL = float(os.getenv("RESONANCE_ABS_TOL", "1e-10"))
    INTEGRATOR_METHOD = os.getenv("RESONANCE_METHOD", "RK45")
    AREA_TOL = 1e-10

    # Default spans in units of T ("p(+inf)" is read at the end of these)
    TRACKING_SPAN = 8.0
    ROBUST_SPAN = 4.0

    # Robust design
    THETA_MIN = 1e-6
    ALPHA_MARGIN = 1e-6
    DESIGN_REL_TOL = 1e-11
    DESIGN_ABS_TOL = 1e-13
    DESIGN_MAX_STEP_FRACTION = 1.0 / 400

    # Phase-space analysis
    EIGEN_REAL_TOL = 1e-9
    DEGENERATE_TOL = 1e-12
    SEPARATRIX_SAMPLES = 401

    # Scans and optimization
    JOBS = int(os.getenv("RESONANCE_JOBS", "1"))
    OBJECTIVE_RESOLUTION = 13
    OPTIMIZER_TOL = 1e-8

    # Output
    OUTPUT_DIR = os.getenv("RESONANCE_OUTPUT_DIR", "output")
    LOG_LEVEL = os.getenv("RESONANCE_LOG_LEVEL", "INFO")
