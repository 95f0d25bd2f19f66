"""Unit convention used throughout the package.

Everything is expressed in natural units with hbar = c = m0 = 1, so the
Compton wavelength is the length unit and (Compton wavelength)/c is the
time unit.  The constants below appear in formulas where a dimensional
factor would sit, purely for readability; conversions to SI are the
caller's concern.
"""

HBAR = 1.0
C = 1.0
M0 = 1.0
LAMBDA_C = 1.0  # hbar / (m0 c)
