import os

from flask.cli import load_dotenv

# Load environment variables from .env file
load_dotenv()

LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')

# Suite defaults
DEFAULT_SEED = int(os.getenv('GNORMLAB_SEED', 20240607))
DEFAULT_TRIALS = int(os.getenv('GNORMLAB_TRIALS', 200))
DEFAULT_DIMS = [
    int(dim) for dim in os.getenv('GNORMLAB_DIMS', '2,3,4,6,8').split(',')
]
DEFAULT_SPECTRUM_RADIUS = float(os.getenv('GNORMLAB_SPECTRUM_RADIUS', 0.9))
DEFAULT_ATOL = float(os.getenv('GNORMLAB_ATOL', 1e-10))
DEFAULT_RTOL = float(os.getenv('GNORMLAB_RTOL', 1e-9))
DEFAULT_CONTOUR_NODES = int(os.getenv('GNORMLAB_CONTOUR_NODES', 256))
DEFAULT_ANGLE_COUNT = int(os.getenv('GNORMLAB_ANGLE_COUNT', 720))
DEFAULT_WORKERS = int(os.getenv('GNORMLAB_WORKERS', 1))

# Jacobi iteration
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 30


class Config:
    DEBUG = False
    TESTING = False
    SECRET_KEY = os.getenv('SECRET_KEY')
    JSON_SORT_KEYS = True

    # Upper bound on trials accepted by the HTTP suite endpoint
    API_MAX_TRIALS = int(os.getenv('API_MAX_TRIALS', 50))
    # Largest matrix dimension accepted by the HTTP suite and replay endpoints
    API_MAX_DIM = int(os.getenv('API_MAX_DIM', 16))


class DevelopmentConfig(Config):
    DEBUG = True
    TESTING = False


class TestingConfig(Config):
    DEBUG = False
    TESTING = True
