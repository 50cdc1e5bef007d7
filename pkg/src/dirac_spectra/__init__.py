"""Solitary waves of the 1D Gross-Neveu model and their spectral stability.

Submodules:
  model      nonlinearities, derived constants, amplitude of the wave
  soliton    profile construction (closed form and quadrature), charge
  odeint     renormalized linear ODE integration and 1D quadrature
  linops     linearized operators, asymptotic wavenumbers and directions
  evans      Evans-function shooting, zero scans/refinement, gap spectra
  resonance  threshold-resonance phases, WKB integrals, crossing search
  acceptance pass/fail checks behind the `verify` subcommand
  runio      deterministic CSV/JSON emission and result caching
  cli        command-line front end (see `dirac-spectra --help`)
"""

__version__ = "0.1.0"
