"""Numerical tolerances used across the toolkit.

Everything runs in double precision on dense matrices of dimension <= 256,
which leaves large headroom; the defaults below are fixed globally rather
than tuned per call site. The CP tolerance is looser than the state
tolerances because pseudo-inverse composition amplifies noise.
"""
from dataclasses import dataclass, asdict, replace


@dataclass(frozen=True)
class Tolerances:
    hermiticity: float = 1e-10   # max-abs deviation of m - m^dag on inputs
    unitarity: float = 1e-10     # max-abs deviation of u u^dag - 1
    reconstruction: float = 1e-9  # eig/svd reconstruction identities
    positivity: float = 1e-9     # slack on smallest density-matrix eigenvalue
    separability: float = 1e-9   # pure-state separability verdicts
    entanglement: float = 1e-6   # "entangled at t1" threshold on negativity
    cp: float = 1e-7             # Choi-eigenvalue slack for CP verdicts
    pinv_cutoff: float = 1e-10   # relative singular-value cutoff

    def as_dict(self) -> dict:
        return asdict(self)

    def override(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT = Tolerances()
