import os
from dotenv import load_dotenv

load_dotenv()


def _optional_float(name):
    value = os.environ.get(name)
    return float(value) if value else None


class Config:
    # Rank thresholds (relative to the largest singular value)
    RANK_RTOL = _optional_float('PENCILK_RANK_RTOL')  # None: max(rows, cols) * eps
    # Roundoff allowance per factor when ranking the j-th power: j * ALLOWANCE * rtol
    POWER_RANK_ALLOWANCE = float(os.environ.get('PENCILK_POWER_RANK_ALLOWANCE') or 10)

    # Pencil settings
    PENCIL_TOL = float(os.environ.get('PENCILK_PENCIL_TOL') or 1e-10)
    GSD_TOL = float(os.environ.get('PENCILK_GSD_TOL') or 1e-8)
    EIGENPAIR_TOL = float(os.environ.get('PENCILK_EIGENPAIR_TOL') or 1e-8)

    # Drazin settings
    DRAZIN_COND_LIMIT = float(os.environ.get('PENCILK_DRAZIN_COND_LIMIT') or 1e12)

    # DAE settings
    RESIDUAL_TOL = float(os.environ.get('PENCILK_RESIDUAL_TOL') or 1e-8)
    CONSISTENCY_TOL = float(os.environ.get('PENCILK_CONSISTENCY_TOL') or 1e-8)
    STABILITY_MARGIN = float(os.environ.get('PENCILK_STABILITY_MARGIN') or 1e-9)

    # Worked example checks pass when every published value is matched this closely
    EXAMPLE_CHECK_TOL = float(os.environ.get('PENCILK_EXAMPLE_CHECK_TOL') or 1e-9)

    # Output settings
    PRECISION = int(os.environ.get('PENCILK_PRECISION') or 12)
    OUTPUT_FORMAT = os.environ.get('PENCILK_FORMAT', 'json').lower()
    OUTPUT_FOLDER = os.environ.get('PENCILK_OUT', 'pencilk-out')
    DISPLAY_ZERO_TOL = float(os.environ.get('PENCILK_DISPLAY_ZERO_TOL') or 1e-13)

    # Logging
    LOG_LEVEL = os.environ.get('PENCILK_LOG_LEVEL', 'WARNING').upper()
    LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'

    # Worked example parameters (fertilities b1, b2 and survival rates p1, p2)
    LESLIE_PARAMETERS = {
        'b1': 1.1,
        'b2': 2.3,
        'p1': 0.9,
        'p2': 0.7,
    }
