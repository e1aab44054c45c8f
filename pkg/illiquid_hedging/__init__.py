"""Nonlinear hedging PDEs for illiquid markets: residuals, symmetries and invariant solutions."""

__version__ = '0.1.0'
