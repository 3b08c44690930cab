"""Companion tools for the kyfrog KEM: the external-estimator bridge and the
figure-regeneration scripts. These talk to the main package only through its
documented file formats and command-line interface.
"""

__version__ = "0.1.0"
