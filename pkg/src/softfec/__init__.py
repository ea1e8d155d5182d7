"""Chase-II list decoding of product and staircase codes with eBCH
constituents, comparing Chase-Pyndiah soft output against a gamma-weighted
list posterior, plus a Monte-Carlo BER harness."""

__version__ = "0.1.0"
