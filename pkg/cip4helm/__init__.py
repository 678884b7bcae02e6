"""Continuous interior penalty finite elements for the 1D Helmholtz equation.

Library modules live in cip4helm.utils, runnable pipelines in cip4helm.scripts.
"""
__version__ = '0.1.0'
