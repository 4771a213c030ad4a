import importlib
import os

from .core import Base

DEFAULT_SETTINGS = {
    "LOG_FORMAT": '%(log_color)s[%(name)s]: %(message)s',
    "LOG_LEVEL": 'INFO',
    "LOG_COLORS": {
        'DEBUG': 'cyan',
        'INFO': 'green',
        'WARNING': 'yellow',
        'ERROR': 'red',
        'CRITICAL': 'bold_red',
    },
    "DEFAULT_SEED": 20160412,
    "DEFAULT_GAMMA": 0.5,
    "DEFAULT_LAMBDA_FACTOR": 4.0,
    "DEFAULT_A": 2.0,
    "DEFAULT_K0": 1.0,
    "BRUTE_FORCE_CAP": 20,
    "SOLVE_K_CAP": 10 ** 6,
    "PACK_MAX_SIZE": 1024,
    "TAIL_GRID_POINTS": 20,
    "TAIL_GRID_RANGE": (0.1, 50.0),
    "COVERAGE_LEVEL": 0.95,
    "WORKERS": 1,
}


ROWSPARSE_SETTINGS_MODULE_ENV = 'ROWSPARSE_SETTINGS_MODULE'
ROWSPARSE_SEED_ENV = 'ROWSPARSE_SEED'


class Settings(Base):

    def __init__(self):
        super(Settings, self).__init__()
        self._settings = DEFAULT_SETTINGS.copy()
        self._load_setting_module()

    def _load_setting_module(self):
        if ROWSPARSE_SETTINGS_MODULE_ENV in os.environ:
            module = importlib.import_module(os.environ[ROWSPARSE_SETTINGS_MODULE_ENV])
            for k in dir(module):
                if k.isupper():
                    self._settings[k] = getattr(module, k)

    @property
    def seed_override(self):
        '''
        The seed forced through ROWSPARSE_SEED, or None.
        '''
        value = os.environ.get(ROWSPARSE_SEED_ENV)
        if value is None or value.strip() == '':
            return None
        try:
            return int(value)
        except ValueError:
            raise ValueError("%s must be an integer, got '%s'." % (ROWSPARSE_SEED_ENV, value))

    def resolve_seed(self, seed=None):
        '''
        Applies the precedence ROWSPARSE_SEED > explicit seed > DEFAULT_SEED.
        '''
        override = self.seed_override
        if override is not None:
            return override
        if seed is None:
            return self._settings['DEFAULT_SEED']
        return int(seed)

    def __getattr__(self, attr):
        if attr.startswith('_'):
            raise AttributeError(attr)
        try:
            return self._settings[attr]
        except KeyError:
            raise ValueError("Invalid Setting '%s'." % (attr))


settings = Settings()
