"""zmclab: a numerical laboratory for self-similar blow-up in
zero-mean-curvature wave equations.

The package verifies explicit blow-up solution families against their PDEs,
reduces them to similarity coordinates, integrates profile and steady ODEs,
evolves the hyperbolic equations with a cone-excised method of lines,
classifies linear modes, monitors conserved quantities, and audits every
quantitative claim of the source material against independently computed
values.
"""

__version__ = "0.1.0"
