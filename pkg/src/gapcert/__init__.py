"""Certified spectral-gap lower bounds and design depths for 1D
staircase/brickwork random circuits.

The package splits into exact combinatorial layers (permutations, irreps,
polynomials, Weingarten forms, derangement sums), the 3-site operator
bounds built on them (gate_blocks), the composition layer turning
per-gate bounds into circuit-level gap and depth certificates (composer),
dense brute-force cross-checks (oracle), the t > q intersection numerics
(coderanged), and a deterministic CLI (cli).
"""

from . import (
    coderanged,
    composer,
    derangement,
    gate_blocks,
    irreps,
    oracle,
    permutations,
    polynomials,
    weingarten,
)
from .composer import (
    DepthBounds,
    GapCertificate,
    certify,
    design_constant,
    design_depth,
    gap_bounds,
    gershgorin_bound,
    sev_ratio,
)

__all__ = [
    "coderanged",
    "composer",
    "derangement",
    "gate_blocks",
    "irreps",
    "oracle",
    "permutations",
    "polynomials",
    "weingarten",
    "DepthBounds",
    "GapCertificate",
    "certify",
    "design_constant",
    "design_depth",
    "gap_bounds",
    "gershgorin_bound",
    "sev_ratio",
]

__version__ = "0.1.0"
