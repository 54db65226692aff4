"""Exact spin-1 evolution in a static effective magnetic field.

Basis order is (|1,+1>, |1,0>, |1,-1>) throughout. The eigenframe of the
Zeeman Hamiltonian H = muB gF (B . F) has the closed form

    |Phi_+1> = ( (1+bz)/2 e^{-i phi},  s/sqrt2,      (1-bz)/2 e^{+i phi} )
    |Phi_0>  = ( -s/sqrt2 e^{-i phi},  bz,           s/sqrt2 e^{+i phi}  )
    |Phi_-1> = ( (1-bz)/2 e^{-i phi}, -s/sqrt2,      (1+bz)/2 e^{+i phi} )

with bz the z-component of the unit field, s = sqrt(1-bz^2),
phi = atan2(by, bx), and eigenvalues (+1, 0, -1) * hbar*omega_L where
omega_L = muB gF B_eff / hbar (signed; gF < 0). Free evolution is a pure
phase in this frame, so propagation is exact for any time step.

Conventions: B_eff = 0 returns the canonical z basis with omega_L = 0;
phi = 0 when the field is along +/-z.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .constants import CONST

_SQRT2 = np.sqrt(2.0)
_NORM_TOL = 1e-12

# Spin-1 angular momentum matrices in units of hbar, basis (m=+1, 0, -1).
FX = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / _SQRT2
FY = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / _SQRT2
FZ = np.diag([1.0, 0.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class FieldVector:
    """Magnetic field vector in tesla."""

    bx: float
    by: float
    bz: float

    def __post_init__(self):
        if not all(np.isfinite([self.bx, self.by, self.bz])):
            raise ValueError("field components must be finite")

    @property
    def magnitude(self) -> float:
        return float(np.sqrt(self.bx**2 + self.by**2 + self.bz**2))

    def as_array(self) -> np.ndarray:
        return np.array([self.bx, self.by, self.bz], dtype=float)


class Spin1State:
    """Normalized 3-component amplitude vector, basis (|1,+1>, |1,0>, |1,-1>)."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes):
        amps = np.asarray(amplitudes, dtype=complex).reshape(3).copy()
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"state norm {norm!r} deviates from 1 beyond 1e-12")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes) -> "Spin1State":
        amps = np.asarray(amplitudes, dtype=complex).reshape(3)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(amps / norm)

    @classmethod
    def basis(cls, m: int) -> "Spin1State":
        """The |1,m> basis state, m in {+1, 0, -1}."""
        amps = np.zeros(3, dtype=complex)
        amps[{+1: 0, 0: 1, -1: 2}[m]] = 1.0
        return cls(amps)

    def overlap(self, other: "Spin1State") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def density(self) -> "Spin1Density":
        return Spin1Density(np.outer(self.amplitudes, self.amplitudes.conj()))

    def __repr__(self):
        return f"Spin1State({self.amplitudes.tolist()!r})"


# Frequently used states, by the label the config files use.
_NAMED_AMPLITUDES = {
    "m+1": (1, 0, 0),
    "m0": (0, 1, 0),
    "m-1": (0, 0, 1),
    "x+": (1 / _SQRT2, 0, 1 / _SQRT2),    # (|1,-1> + |1,+1>)/sqrt2
    "x-": (-1 / _SQRT2, 0, 1 / _SQRT2),   # (|1,-1> - |1,+1>)/sqrt2
    "y+": (-1j / _SQRT2, 0, 1 / _SQRT2),  # (|1,-1> - i|1,+1>)/sqrt2
    "y-": (1j / _SQRT2, 0, 1 / _SQRT2),   # (|1,-1> + i|1,+1>)/sqrt2
}


def named_state(name: str) -> Spin1State:
    """State by label: m+1, m0, m-1, x+/-, y+/- (qubit-subspace states)."""
    try:
        return Spin1State(np.array(_NAMED_AMPLITUDES[name], dtype=complex))
    except KeyError:
        raise ValueError(f"unknown state name {name!r}; "
                         f"expected one of {sorted(_NAMED_AMPLITUDES)}") from None


class Spin1Density:
    """3x3 density matrix, basis (|1,+1>, |1,0>, |1,-1>)."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        rho = np.asarray(matrix, dtype=complex).reshape(3, 3).copy()
        if np.max(np.abs(rho - rho.conj().T)) > _NORM_TOL:
            raise ValueError("density matrix not Hermitian within 1e-12")
        if abs(np.trace(rho).real - 1.0) > _NORM_TOL:
            raise ValueError("density matrix trace deviates from 1 beyond 1e-12")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise ValueError("density matrix has eigenvalue below -1e-10")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def maximally_mixed(cls) -> "Spin1Density":
        return cls(np.eye(3) / 3.0)

    def trace_squared(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def __repr__(self):
        return f"Spin1Density({self.matrix.tolist()!r})"


@dataclass(frozen=True)
class EigenFrame:
    """Eigenstates (Phi_+1, Phi_0, Phi_-1) of the field Hamiltonian and omega_L.

    ``matrix`` holds the eigenvectors as columns in k = (+1, 0, -1) order;
    H Phi_k = k hbar omega_L Phi_k.
    """

    states: tuple[Spin1State, Spin1State, Spin1State]
    omega_l: float  # rad/s, signed

    @property
    def phi_plus(self) -> Spin1State:
        return self.states[0]

    @property
    def phi_zero(self) -> Spin1State:
        return self.states[1]

    @property
    def phi_minus(self) -> Spin1State:
        return self.states[2]

    @property
    def matrix(self) -> np.ndarray:
        return np.stack([s.amplitudes for s in self.states], axis=1)


def hamiltonian(field: FieldVector) -> np.ndarray:
    """Zeeman Hamiltonian muB gF (B . F), J (F in units of hbar)."""
    return CONST.muB * CONST.gF * (field.bx * FX + field.by * FY + field.bz * FZ)


def larmor_frequency(field: FieldVector) -> float:
    """Signed omega_L = muB gF B_eff / hbar, rad/s."""
    return CONST.gyromagnetic * field.magnitude


def eigenvectors_batch(fields: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigenframes for many fields at once.

    fields: (n, 3) tesla. Returns (V, omega_l): V is (n, 3, 3) with
    eigenvector columns in k = (+1, 0, -1) order, omega_l is (n,) signed.
    Zero fields get the canonical basis and omega_l = 0.
    """
    fields = np.asarray(fields, dtype=float).reshape(-1, 3)
    b_eff = np.linalg.norm(fields, axis=1)
    safe = np.where(b_eff > 0, b_eff, 1.0)
    bz = np.where(b_eff > 0, fields[:, 2] / safe, 1.0)
    bz = np.clip(bz, -1.0, 1.0)
    phi = np.arctan2(fields[:, 1], fields[:, 0])  # 0 when bx = by = 0
    s = np.sqrt(np.clip(1.0 - bz * bz, 0.0, None))

    em = np.exp(-1j * phi)
    ep = np.exp(+1j * phi)
    up, dn, sq = 0.5 * (1.0 + bz), 0.5 * (1.0 - bz), s / _SQRT2

    v = np.empty((fields.shape[0], 3, 3), dtype=complex)
    v[:, 0, 0] = up * em
    v[:, 1, 0] = sq
    v[:, 2, 0] = dn * ep
    v[:, 0, 1] = -sq * em
    v[:, 1, 1] = bz
    v[:, 2, 1] = sq * ep
    v[:, 0, 2] = dn * em
    v[:, 1, 2] = -sq
    v[:, 2, 2] = up * ep
    return v, CONST.gyromagnetic * b_eff


def eigenframe(field: FieldVector) -> EigenFrame:
    """Eigenframe of the Hamiltonian for one field (closed form)."""
    v, omega = eigenvectors_batch(field.as_array()[None, :])
    states = tuple(Spin1State.normalized(v[0, :, k]) for k in range(3))
    return EigenFrame(states=states, omega_l=float(omega[0]))


def evolve(state: Spin1State, field: FieldVector, t: float) -> Spin1State:
    """|Psi(t)> = sum_k <Phi_k|Psi(0)> e^{-i k omega_L t} |Phi_k>."""
    frame = eigenframe(field)
    v = frame.matrix
    coeffs = v.conj().T @ state.amplitudes
    phases = np.exp(-1j * np.array([1.0, 0.0, -1.0]) * frame.omega_l * t)
    return Spin1State.normalized(v @ (phases * coeffs))


def survival_probability(init: Spin1State, analysis: Spin1State,
                         field: FieldVector, t: float) -> float:
    """|<analysis| U(t) |init>|^2."""
    amp = np.vdot(analysis.amplitudes, evolve(init, field, t).amplitudes)
    return float(np.abs(amp) ** 2)


def evolve_density(rho: Spin1Density, field: FieldVector, t: float) -> Spin1Density:
    """U rho U^dagger with the same propagator as ``evolve``."""
    frame = eigenframe(field)
    v = frame.matrix
    phases = np.exp(-1j * np.array([1.0, 0.0, -1.0]) * frame.omega_l * t)
    u = (v * phases) @ v.conj().T
    out = u @ rho.matrix @ u.conj().T
    out = 0.5 * (out + out.conj().T)  # strip rounding asymmetry
    return Spin1Density(out / np.trace(out).real)


def propagate_piecewise(state: Spin1State, field_samples, dt: float,
                        keep_trajectory: bool = False):
    """Apply ``evolve`` successively, one sample per step of length dt.

    Samples should be the field at each step midpoint. Each step is exactly
    unitary; the state is renormalized per step so the norm contract holds
    over arbitrarily many steps. Warns when dt * max|omega_L| exceeds
    0.1 rad/step (the staircase then resolves the field poorly).

    Returns the final state, or the full trajectory (initial state included)
    when keep_trajectory is set.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    fields = [f.as_array() if isinstance(f, FieldVector) else np.asarray(f, dtype=float)
              for f in field_samples]
    if fields:
        v, omega = eigenvectors_batch(np.stack(fields))
        max_step = float(np.max(np.abs(omega))) * dt
        if max_step > 0.1:
            warnings.warn(f"dt*max|omega_L| = {max_step:.3g} rad/step exceeds 0.1; "
                          "reduce dt", stacklevel=2)
    trajectory = [state]
    current = state.amplitudes
    k = np.array([1.0, 0.0, -1.0])
    for i in range(len(fields)):
        vi = v[i]
        coeffs = vi.conj().T @ current
        current = vi @ (np.exp(-1j * k * omega[i] * dt) * coeffs)
        current = current / np.linalg.norm(current)
        if keep_trajectory:
            trajectory.append(Spin1State(current))
    if keep_trajectory:
        return trajectory
    return Spin1State(current)


def survival_curve_batch(init: Spin1State, analysis: Spin1State,
                         fields: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Survival probabilities for many static fields on one time grid.

    fields: (n, 3) tesla; times: (m,) s. Returns (n, m). This is the hot
    path behind ensemble averaging and quadrature: with z_k the product of
    analysis and init eigenframe amplitudes, the survival amplitude is
    z_0 + z_+ e^{-i omega t} + z_- e^{+i omega t}.
    """
    times = np.asarray(times, dtype=float).reshape(-1)
    v, omega = eigenvectors_batch(fields)
    a = np.einsum("nik,i->nk", v.conj(), init.amplitudes)       # <Phi_k|init>
    b = np.einsum("nik,i->nk", v.conj(), analysis.amplitudes)   # <Phi_k|analysis>
    z = b.conj() * a
    phase = np.exp(-1j * np.outer(omega, times))
    amp = z[:, 1][:, None] + z[:, 0][:, None] * phase + z[:, 2][:, None] * phase.conj()
    return np.abs(amp) ** 2
