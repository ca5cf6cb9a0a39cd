"""prooflens: a small proof-mining workbench.

Two halves share this package:

* a symbolic side (:mod:`prooflens.formula`, :mod:`prooflens.dialectica`,
  :mod:`prooflens.models`, :mod:`prooflens.metastability`) that parses
  domain-annotated first-order formulas and computes Skolem, prenex and
  Dialectica (ND) forms, checked against brute-force finite models;
* a numeric side (:mod:`prooflens.analysis`, :mod:`prooflens.jackson`,
  :mod:`prooflens.harness`) that certifies the quantitative uniqueness
  theorem for best L1 polynomial approximation with exact rationals.
"""

__version__ = "0.1.0"
