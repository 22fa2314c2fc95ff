# Configuration for the egomap toolkit

import os
import tempfile

class Config:
    """Base configuration class"""
    # Detection defaults
    DETECTOR = 'louvain'
    MIN_COMMUNITY_SIZE = 3
    LABEL_TOP_K = 5
    WALK_LENGTH = 4
    SEED = 0

    # Null model: 'stub' matches the closed form in expectation, 'swap' keeps degrees exactly
    NULL_MODEL = 'stub'
    MC_TRIALS = 2000
    SWAPS_PER_EDGE = 10

    # Thread pool size for per-source and Monte-Carlo passes
    MAX_WORKERS = int(os.environ.get('EGOMAP_MAX_WORKERS', '1'))

    CACHE_DIR = os.environ.get('EGOMAP_CACHE_DIR') or os.path.join(os.getcwd(), '.egomap_cache')
    CACHE_ENABLED = True
    LOGS_DIR = os.path.join(os.getcwd(), 'logs')
    AUDIT_ENABLED = True
    LOG_LEVEL = os.environ.get('EGOMAP_LOG_LEVEL', 'INFO')

class DevelopmentConfig(Config):
    """Development configuration"""
    ENV = 'development'
    LOG_LEVEL = os.environ.get('EGOMAP_LOG_LEVEL', 'DEBUG')

class ProductionConfig(Config):
    """Production configuration"""
    ENV = 'production'
    LOG_LEVEL = os.environ.get('EGOMAP_LOG_LEVEL', 'WARNING')

class TestingConfig(Config):
    """Testing configuration"""
    TESTING = True
    ENV = 'testing'
    CACHE_ENABLED = False
    AUDIT_ENABLED = False
    CACHE_DIR = os.path.join(tempfile.gettempdir(), 'egomap_test_cache')
    LOG_LEVEL = 'WARNING'
    MC_TRIALS = 500

# Configuration dictionary
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}

def get_config(name=None):
    """Return the configuration class for ``name`` or ``$EGOMAP_ENV``."""
    name = name or os.environ.get('EGOMAP_ENV', 'default')
    return config.get(name, config['default'])
