"""fanolab: exact finite-field laboratory for lines and conics on complete intersections."""

__version__ = "0.1.0"

# Bump when chart, monomial-order, or report-layout conventions change, so
# serialized fixtures can detect drift.
CONVENTIONS = "rref-charts/deglex/quadric-u2-uv-uw-v2-vw-w2/st-index-j/v1"
