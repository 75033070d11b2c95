""" Contains the current version of orientquadrics which is used in setup.py and can also be used
    to determine orientquadrics's version during runtime.
"""

__version__ = '0.3.0'
