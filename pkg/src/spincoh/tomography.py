"""Partial spin-1 tomography: simulated projective readout on the qubit
subspace, density reconstruction and the purity parameter.

Each simulated measurement projects onto three orthogonal outcomes: a
qubit-subspace analysis state ("plus"), its orthogonal partner ("minus") and
|1,0> ("outside"). The three bases are the Pauli eigenbases of the qubit
spanned by {|1,-1>, |1,+1>} with |1,+1> as the +z pole:

    sigma_z: |1,+1>,                    |1,-1>
    sigma_x: (|1,-1> + |1,+1>)/sqrt2,   (|1,-1> - |1,+1>)/sqrt2
    sigma_y: (|1,-1> - i|1,+1>)/sqrt2,  (|1,-1> + i|1,+1>)/sqrt2

(the plus column carries Pauli eigenvalue +1; with this phase choice the
qubit sigma matrices are the standard ones).

Coherences to |1,0> are not measurable here; reconstruction therefore sets
them to zero, which makes the resulting purity a lower bound on the purity
of any completion. Expectations are normalized conditionally on the qubit
subspace, the only reading under which the embedded 2x2 block plus the
|1,0> population forms a trace-1 density matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .spin1 import Spin1Density, named_state

BASES = ("sigma_x", "sigma_y", "sigma_z")

_PLUS_MINUS = {
    "sigma_x": (named_state("x+"), named_state("x-")),
    "sigma_y": (named_state("y+"), named_state("y-")),
    "sigma_z": (named_state("m+1"), named_state("m-1")),
}

# Standard qubit Paulis in the (|1,+1>, |1,-1>) ordering.
_SIGMA = {
    "sigma_x": np.array([[0, 1], [1, 0]], dtype=complex),
    "sigma_y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "sigma_z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome counts of one projective measurement basis."""

    basis: str
    shots: int
    count_plus: int
    count_minus: int
    count_outside: int

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}")
        if min(self.count_plus, self.count_minus, self.count_outside) < 0:
            raise ValueError("counts must be >= 0")
        if self.count_plus + self.count_minus + self.count_outside != self.shots:
            raise ValueError("counts must sum to shots")


@dataclass(frozen=True)
class PauliExpectations:
    """Qubit Pauli expectations conditional on the qubit subspace.

    p_sub is the probability mass found in {|1,-1>, |1,+1>} (averaged over
    the measured bases).
    """

    ex: float
    ey: float
    ez: float
    p_sub: float

    def __post_init__(self):
        if not 0.0 <= self.p_sub <= 1.0:
            raise ValueError("p_sub must lie in [0, 1]")
        for v in (self.ex, self.ey, self.ez):
            if abs(v) > 1.0 + 1e-9:
                raise ValueError("conditional expectations must lie in [-1, 1]")

    def absolute(self) -> tuple[float, float, float]:
        """The unconditional reading: expectations scaled by p_sub."""
        return (self.ex * self.p_sub, self.ey * self.p_sub, self.ez * self.p_sub)


@dataclass(frozen=True)
class PurityReport:
    """Purity parameter r and the underlying trace(rho^2)."""

    r: float
    trace_rho_sq: float


@dataclass(frozen=True)
class ReconstructedState:
    """Reconstructed density plus a flag for positivity repair."""

    rho: Spin1Density
    repaired: bool


def born_probabilities(rho: Spin1Density, basis: str) -> np.ndarray:
    """(p_plus, p_minus, p_outside) for a basis; sums to 1 exactly."""
    plus, minus = _PLUS_MINUS[basis]
    p_plus = float(np.real(plus.amplitudes.conj() @ rho.matrix @ plus.amplitudes))
    p_minus = float(np.real(minus.amplitudes.conj() @ rho.matrix @ minus.amplitudes))
    p = np.clip([p_plus, p_minus, 1.0 - p_plus - p_minus], 0.0, 1.0)
    return p / p.sum()


def simulate_measurement(rho: Spin1Density, basis: str, shots: int,
                         seed: int) -> MeasurementRecord:
    """Multinomial draw of ``shots`` outcomes from the Born probabilities.

    Deterministic in (seed, basis): shot i consumes index i of the
    measurement stream for that basis.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = born_probabilities(rho, basis)
    domain = rng.DOMAIN_MEASUREMENT + BASES.index(basis)
    u = rng.uniforms(seed, domain, 0, shots, 1)[:, 0]
    outcome = np.searchsorted(np.cumsum(p)[:2], u)
    counts = np.bincount(outcome, minlength=3)
    return MeasurementRecord(basis=basis, shots=shots,
                             count_plus=int(counts[0]),
                             count_minus=int(counts[1]),
                             count_outside=int(counts[2]))


def expectations_from_records(records) -> PauliExpectations:
    """Conditional Pauli expectations from one record per basis.

    e_i = (plus - minus) / (plus + minus) per basis; p_sub is the mean
    in-subspace fraction. A basis with zero in-subspace counts leaves the
    expectation undefined and raises.
    """
    by_basis = {r.basis: r for r in records}
    if set(by_basis) != set(BASES):
        raise ValueError(f"need exactly one record per basis {BASES}")
    values = {}
    subspace = []
    for basis in BASES:
        rec = by_basis[basis]
        in_sub = rec.count_plus + rec.count_minus
        if in_sub == 0:
            raise ValueError(f"{basis}: no counts in the qubit subspace; "
                             "expectation undefined")
        values[basis] = (rec.count_plus - rec.count_minus) / in_sub
        subspace.append(in_sub / rec.shots)
    return PauliExpectations(ex=values["sigma_x"], ey=values["sigma_y"],
                             ez=values["sigma_z"], p_sub=float(np.mean(subspace)))


def expectations_from_density(rho: Spin1Density) -> PauliExpectations:
    """Exact expectations of a density matrix (infinite-shot limit)."""
    sub = rho.matrix[np.ix_([0, 2], [0, 2])]  # (|1,+1>, |1,-1>) block
    p_sub = float(np.trace(sub).real)
    if p_sub <= 0:
        raise ValueError("no population in the qubit subspace")
    return PauliExpectations(
        ex=float(np.trace(_SIGMA["sigma_x"] @ sub).real / p_sub),
        ey=float(np.trace(_SIGMA["sigma_y"] @ sub).real / p_sub),
        ez=float(np.trace(_SIGMA["sigma_z"] @ sub).real / p_sub),
        p_sub=p_sub,
    )


def reconstruct_density(exp: PauliExpectations) -> ReconstructedState:
    """Embed the reconstructed qubit block into the 3x3 spin-1 matrix.

    rho_s = (p_sub/2)(1 + ex sx + ey sy + ez sz) on {|1,+1>, |1,-1>};
    rho_00 = 1 - p_sub with zero coherences to |1,0> (worst case). If shot
    noise pushes an eigenvalue negative, the spectrum is clipped at zero and
    renormalized, and the result is flagged as repaired.
    """
    sub = 0.5 * exp.p_sub * (np.eye(2, dtype=complex)
                             + exp.ex * _SIGMA["sigma_x"]
                             + exp.ey * _SIGMA["sigma_y"]
                             + exp.ez * _SIGMA["sigma_z"])
    rho = np.zeros((3, 3), dtype=complex)
    rho[np.ix_([0, 2], [0, 2])] = sub
    rho[1, 1] = 1.0 - exp.p_sub

    eigvals = np.linalg.eigvalsh(rho)
    repaired = bool(eigvals.min() < -1e-10)
    if repaired:
        vals, vecs = np.linalg.eigh(rho)
        vals = np.clip(vals, 0.0, None)
        rho = (vecs * vals) @ vecs.conj().T
        rho = rho / np.trace(rho).real
        rho = 0.5 * (rho + rho.conj().T)
    return ReconstructedState(rho=Spin1Density(rho), repaired=repaired)


def purity_parameter(rho: Spin1Density) -> PurityReport:
    """r = sqrt((3 trace(rho^2) - 1) / 2), clamped to [0, 1].

    The weight of the closest pure state in rho = r |chi><chi| + (1-r) 1/3:
    r = 1 for pure states, r = 0 for the maximally mixed state.
    """
    q = rho.trace_squared()
    r = float(np.sqrt(np.clip((3.0 * q - 1.0) / 2.0, 0.0, 1.0)))
    return PurityReport(r=min(r, 1.0), trace_rho_sq=q)
