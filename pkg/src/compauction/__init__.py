"""Optimal competitive auctions for digital goods.

Tools to decide whether a revenue benchmark admits a truthful auction with a
given competitive ratio, to synthesize such an auction constructively when it
does, and to compute the optimal ratios of the standard fixed-price and
k-item Vickrey benchmarks both in closed form and by simulation.
"""

from compauction.grid import BidGrid, DomainTooLargeError, Upset

__all__ = ["BidGrid", "DomainTooLargeError", "Upset"]
__version__ = "0.1.0"
