"""Numerical experiments on marked hyperbolic surfaces.

Subpackages cover the hyperbolic plane (hyp2), pair-of-pants trigonometry
(pants), Fenchel-Nielsen holonomy (surface), word enumeration (curves),
cylinder analytics (cylinder), intersection combinatorics (combinat),
Thurston-metric path experiments (thurston) and limit cones (cones).
"""

__version__ = "0.1.0"
