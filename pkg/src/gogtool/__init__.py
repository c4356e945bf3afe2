"""Exact computational toolkit for graphs of finitely generated abelian groups.

Subpackages cover integer linear algebra over f.g. abelian groups (abelian),
the graph-of-groups input format and spanning trees (gog), word reduction in
the fundamental groupoid (words), the acting tree and its boundary (bstree),
decision procedures for the boundary action (dynamics), operator-algebraic
classification reports (classify), and exact verification of the generating
operator relations (gfamily).  Everything is integer/rational exact; no
floating point.
"""

__version__ = "0.1.0"
