"""
Configuration settings for the GTL toolkit
"""
import os
from dotenv import load_dotenv

from utils import ConfigurationError

load_dotenv()


class Config:
    # Search limits
    SIGMA_BUDGET = int(os.getenv('GTL_SIGMA_BUDGET', '12'))
    CHARFORM_BUDGET = int(os.getenv('GTL_CHARFORM_BUDGET', '2'))

    # Execution
    MAX_WORKERS = int(os.getenv('GTL_MAX_WORKERS', '1'))
    VERIFY_WITNESS = os.getenv('GTL_VERIFY_WITNESS', 'true').lower() == 'true'

    # Reporting
    LOG_LEVEL = os.getenv('GTL_LOG_LEVEL', 'INFO')
    OUTPUT_FORMAT = os.getenv('GTL_OUTPUT_FORMAT', 'text')

    OUTPUT_FORMATS = ('text', 'json')
    LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')

    @classmethod
    def validate_config(cls):
        """Validate that configured values are usable"""
        invalid = []
        if cls.SIGMA_BUDGET < 0:
            invalid.append('GTL_SIGMA_BUDGET')
        if cls.CHARFORM_BUDGET < 0:
            invalid.append('GTL_CHARFORM_BUDGET')
        if cls.MAX_WORKERS < 1:
            invalid.append('GTL_MAX_WORKERS')
        if cls.OUTPUT_FORMAT not in cls.OUTPUT_FORMATS:
            invalid.append('GTL_OUTPUT_FORMAT')
        if cls.LOG_LEVEL.upper() not in cls.LOG_LEVELS:
            invalid.append('GTL_LOG_LEVEL')

        if invalid:
            raise ConfigurationError(f"Invalid configuration: {', '.join(invalid)}")

        return True
