"""
Command-line front end: run experiments, verification suites and the preset catalogue.
"""

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INVALID_CONFIG = 2
EXIT_RUNTIME_FAILURE = 3
