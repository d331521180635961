"""Layered stratified-flow library: constitutive framework, hydrostatic
profiles, vorticity solver on the torus-times-interval domain, and
relative-energy diagnostics."""

__version__ = "0.1.0"
