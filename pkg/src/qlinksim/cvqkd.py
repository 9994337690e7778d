"""Displaced Gaussian-modulation rates over a thermal-loss channel.

One coherent-state train carries both payloads: a binary phase
displacement decided by sign (the bit channel) and Gaussian quadrature
modulation (the key channel).  The displacement is sized to meet a bit
error target, so its received power is set by the noise floor rather
than the loss; the fraction of that power left behind by the phase
correction acts as excess noise for the key and is granted to the
eavesdropper.  The key analysis uses the standard entangling-cloner
covariance algebra with a trusted receiver: detector efficiency and
electronic noise sit inside Bob's station, so the eavesdropper purifies
only the channel.  Eve's conditional entropy is computed by modelling
the detector as a beamsplitter whose idle port is fed half of an EPR
state (purifying the electronic noise) and conditioning the remaining
modes on Bob's homodyne outcome.

All variances are in shot-noise units (SNU, vacuum = 1) unless suffixed
otherwise; the raw-unit convention (vacuum quadrature variance 0.25) is
convertible via snu_from_raw / raw_from_snu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mathfn import ber_to_snr_amplitude, bosonic_entropy

__all__ = [
    "CvProtocolParams",
    "PhaseEncodingNoise",
    "ThermalLossChannel",
    "CvDiagnostics",
    "CvRateResult",
    "snu_from_raw",
    "raw_from_snu",
    "classical_displacement",
    "channel_snr",
    "mutual_information",
    "holevo_bound",
    "composable_key_rate",
]


@dataclass(frozen=True)
class CvProtocolParams:
    """Source, receiver and post-processing parameters of the CV protocol.

    eta_lo is the transmissivity equivalent of the local-oscillator
    handling loss (0.63 dB -> 10**(-0.063) ~ 0.865); together with
    eta_det it forms the trusted receiver efficiency.  d_bits is the
    discretization depth of the reconciliation alphabet.
    """

    v_mod: float = 5.0
    v_el: float = 0.1
    shot_noise_variance: float = 0.25  # raw-unit vacuum variance defining 1 SNU
    eta_det: float = 0.5
    eta_lo: float = 10.0 ** (-0.063)
    n_bg: float = 9.31e-10
    ber_target: float = 1e-6
    p_ec: float = 0.9
    eps_cor: float = 1e-10
    beta: float = 0.98
    eps_sec: float = 1e-10
    eps_hash: float = 1e-10
    d_bits: int = 5

    def __post_init__(self) -> None:
        if not self.v_mod > 0.0:
            raise ValueError(f"modulation variance must be > 0: {self.v_mod!r}")
        if self.v_el < 0.0:
            raise ValueError(f"electronic noise must be >= 0: {self.v_el!r}")
        if not self.shot_noise_variance > 0.0:
            raise ValueError("raw shot-noise variance must be > 0")
        for name in ("eta_det", "eta_lo", "p_ec", "beta"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1]: {value!r}")
        for name in ("eps_cor", "eps_sec", "eps_hash"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1): {value!r}")
        if not 0.0 < self.ber_target <= 0.5:
            raise ValueError(f"ber_target must lie in (0, 0.5]: {self.ber_target!r}")
        if self.n_bg < 0.0:
            raise ValueError(f"background occupancy must be >= 0: {self.n_bg!r}")
        if not (isinstance(self.d_bits, int) and self.d_bits >= 1):
            raise ValueError(f"d_bits must be a positive integer: {self.d_bits!r}")

    @property
    def eta_receiver(self) -> float:
        """Total trusted receiver transmissivity eta_det * eta_lo."""
        return self.eta_det * self.eta_lo


@dataclass(frozen=True)
class PhaseEncodingNoise:
    """Excess noise left behind by the classical phase displacement.

    The receiver subtracts the known displacement before key
    extraction; eps_classical is the fraction of the received
    displacement power that survives that correction as excess noise.
    Because the displacement is sized to hold the bit error rate fixed,
    its received power (and hence the residual) is roughly independent
    of channel loss, which is what ultimately bounds the secure range.

    Both the residual (SNU at the detector plane) and its input-referred
    and thermal-photon equivalents are protocol- and channel-dependent,
    so they are exposed as methods rather than stored.
    """

    eps_classical: float = 3.9e-5

    def __post_init__(self) -> None:
        if self.eps_classical < 0.0:
            raise ValueError(f"excess noise fraction must be >= 0: {self.eps_classical!r}")

    def residual_excess_noise(self, ch: ThermalLossChannel, p: CvProtocolParams) -> float:
        """Residual variance eps_classical * delta_received^2 at the detector (SNU)."""
        return _detection_noise(ch, p, self)[3]

    def input_referred(self, ch: ThermalLossChannel, p: CvProtocolParams) -> float:
        """The same residual referred back to the channel input (SNU)."""
        if not ch.tau > 0.0:
            raise ValueError("input-referred noise needs tau > 0")
        return self.residual_excess_noise(ch, p) / (ch.tau * p.eta_receiver)

    def equivalent_thermal_photons(self, ch: ThermalLossChannel, p: CvProtocolParams) -> float:
        """Environment occupancy injecting the same output noise.

        n_eq = tau * eps_in / (2 (1 - tau)) for tau < 1 (0 at tau = 1),
        so that (1 - tau) * 2 n_eq / tau = eps_in by construction.
        """
        if ch.tau == 1.0:
            return 0.0
        return ch.tau * self.input_referred(ch, p) / (2.0 * (1.0 - ch.tau))


@dataclass(frozen=True)
class ThermalLossChannel:
    """Bosonic loss channel of transmissivity tau with a thermal environment.

    Output variance obeys V_out = tau V_in + (1 - tau)(2 n_thermal + 1)
    in SNU.
    """

    tau: float
    n_thermal: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"transmissivity must lie in [0, 1]: {self.tau!r}")
        if self.n_thermal < 0.0:
            raise ValueError(f"thermal occupancy must be >= 0: {self.n_thermal!r}")

    def output_variance(self, v_in_snu: float) -> float:
        return self.tau * v_in_snu + (1.0 - self.tau) * (2.0 * self.n_thermal + 1.0)


def snu_from_raw(v_raw: float, shot_noise_variance: float = 0.25) -> float:
    """Convert a raw-unit quadrature variance to shot-noise units."""
    if not shot_noise_variance > 0.0:
        raise ValueError("shot-noise variance must be > 0")
    return v_raw / shot_noise_variance


def raw_from_snu(v_snu: float, shot_noise_variance: float = 0.25) -> float:
    """Convert a shot-noise-unit quadrature variance to raw units."""
    if not shot_noise_variance > 0.0:
        raise ValueError("shot-noise variance must be > 0")
    return v_snu * shot_noise_variance


def _detection_noise(
    ch: ThermalLossChannel, p: CvProtocolParams, noise: PhaseEncodingNoise
) -> tuple[float, float, float, float]:
    """(tau_total, background, bit-decision variance, residual) in SNU.

    The bit decision sees vacuum, electronic noise, the Gaussian key
    modulation and the channel background as noise; the displacement is
    sized against that total, and a fraction eps_classical of its
    received power feeds back in as residual noise.  Self-consistently,
    with leak = eps_classical * amp^2 (amp the BER-target amplitude):

        sigma_bit^2 = (1 + v_el + tau_total v_mod + bg) / (1 - leak)
        residual    = leak * sigma_bit^2

    leak >= 1 means the correction residual outruns the displacement
    power budget and no finite displacement meets the BER target.
    """
    tau_total = ch.tau * p.eta_receiver
    background = p.eta_receiver * (1.0 - ch.tau) * 2.0 * ch.n_thermal
    amp = ber_to_snr_amplitude(p.ber_target)
    leak = noise.eps_classical * amp * amp
    if leak >= 1.0:
        raise ValueError(
            "phase-correction residual outruns the displacement budget: "
            f"eps_classical * amp^2 = {leak:.3f} must be < 1"
        )
    sigma_bit_sq = (1.0 + p.v_el + tau_total * p.v_mod + background) / (1.0 - leak)
    return tau_total, background, sigma_bit_sq, leak * sigma_bit_sq


def classical_displacement(
    ch: ThermalLossChannel, p: CvProtocolParams, noise: PhaseEncodingNoise
) -> float:
    """Smallest input displacement (sqrt SNU) meeting the target BER."""
    if p.ber_target == 0.5:
        return 0.0
    tau_total, _, sigma_bit_sq, _ = _detection_noise(ch, p, noise)
    if tau_total == 0.0:
        return math.inf
    return ber_to_snr_amplitude(p.ber_target) * math.sqrt(sigma_bit_sq / tau_total)


def channel_snr(
    ch: ThermalLossChannel, p: CvProtocolParams, noise: PhaseEncodingNoise
) -> float:
    """Quadrature SNR of the Gaussian modulation after the trusted receiver.

    The displacement itself is subtracted; only its residual counts as
    noise for the key quadratures.
    """
    tau_total, background, _, residual = _detection_noise(ch, p, noise)
    base = 1.0 + p.v_el + background + residual
    return tau_total * p.v_mod / base


def mutual_information(
    ch: ThermalLossChannel, p: CvProtocolParams, noise: PhaseEncodingNoise
) -> float:
    """Reconciled Shannon rate beta * (1/2) log2(1 + SNR) for homodyne."""
    return p.beta * 0.5 * math.log2(1.0 + channel_snr(ch, p, noise))


_Z2 = np.diag([1.0, -1.0])
_I2 = np.eye(2)


def _snap_to_vacuum(nu: float, scale: float) -> float:
    """Round an eigenvalue a numerical hair under 1 back up to 1."""
    if 1.0 - 1e-8 * max(1.0, scale) <= nu < 1.0:
        return 1.0
    return nu


def _symplectic_eigenvalues(gamma: np.ndarray) -> np.ndarray:
    n_modes = gamma.shape[0] // 2
    omega_1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    omega = np.kron(np.eye(n_modes), omega_1)
    eigs = np.linalg.eigvals(omega @ gamma)
    nus = np.sort(np.abs(eigs.imag))
    nus = nus[1::2]  # eigenvalues come in +/- i nu pairs
    # eigensolver noise can leave a physical eigenvalue just under 1
    tol = 1e-8 * max(1.0, float(np.abs(gamma).max()))
    return np.where(nus >= 1.0 - tol, np.maximum(nus, 1.0), nus)


def _conditional_entropy_bits(
    a: float, b: float, c: float, p: CvProtocolParams
) -> tuple[float, tuple[float, ...]]:
    """Entropy of everything Eve cannot touch, given Bob's homodyne outcome.

    The two-mode state (A, B0) with covariance [[a I, c Z], [c Z, b I]]
    enters a detector modelled as a beamsplitter of transmissivity
    eta_receiver whose idle port carries half of an EPR pair of variance
    d = 1 + v_el / (1 - eta); Bob measures x on the bright output.  The
    conditional entropy of (A, dark output, EPR partner) equals Eve's
    conditional entropy because the five-party state is pure.
    """
    eta = p.eta_receiver
    if eta == 1.0:
        if p.v_el > 0.0:
            raise ValueError(
                "electronic noise requires a receiver efficiency below 1 "
                "in the trusted-detector model"
            )
        nu3_sq = a * (a - c * c / b)
        nu3 = _snap_to_vacuum(math.sqrt(max(nu3_sq, 0.0)), a)
        return bosonic_entropy(nu3), (nu3,)

    d = 1.0 + p.v_el / (1.0 - eta)
    e_off = math.sqrt(max(d * d - 1.0, 0.0))

    # covariance of (A, B0, F0, G)
    gamma0 = np.zeros((8, 8))
    gamma0[0:2, 0:2] = a * _I2
    gamma0[2:4, 2:4] = b * _I2
    gamma0[0:2, 2:4] = c * _Z2
    gamma0[2:4, 0:2] = c * _Z2
    gamma0[4:6, 4:6] = d * _I2
    gamma0[6:8, 6:8] = d * _I2
    gamma0[4:6, 6:8] = e_off * _Z2
    gamma0[6:8, 4:6] = e_off * _Z2

    # beamsplitter on (B0, F0): B1 = sqrt(eta) B0 + sqrt(1-eta) F0
    s_bs = np.eye(8)
    rt, rr = math.sqrt(eta), math.sqrt(1.0 - eta)
    s_bs[2:4, 2:4] = rt * _I2
    s_bs[2:4, 4:6] = rr * _I2
    s_bs[4:6, 2:4] = -rr * _I2
    s_bs[4:6, 4:6] = rt * _I2
    gamma1 = s_bs @ gamma0 @ s_bs.T

    rest = [0, 1, 4, 5, 6, 7]  # modes A, F1, G
    var_x = gamma1[2, 2]
    u = gamma1[np.ix_(rest, [2])]
    gamma_cond = gamma1[np.ix_(rest, rest)] - (u @ u.T) / var_x

    nus = _symplectic_eigenvalues(gamma_cond)
    entropy = sum(bosonic_entropy(float(nu)) for nu in nus)
    return entropy, tuple(float(nu) for nu in nus)


def holevo_bound(
    ch: ThermalLossChannel,
    p: CvProtocolParams,
    noise: PhaseEncodingNoise,
) -> tuple[float, tuple[float, ...]]:
    """Holevo information chi_E in bits/use, plus (nu1, nu2, nu_cond...).

    Channel-output covariance uses a = V = v_mod + 1,
    b = tau (V + chi_line), c = sqrt(tau (V^2 - 1)) with
    chi_line = (1 - tau)/tau (2 n_thermal + 1) + eps_in, so that
    b = tau V + (1 - tau)(2 n + 1) + tau eps_in matches the channel's
    output-variance identity.  eps_in is the input-referred residual of
    the classical displacement; its detector-plane value is nearly
    constant in tau, so eps_in grows like 1/tau and the key rate dies at
    finite loss.  The residual is granted to the eavesdropper (referred
    to the channel, not the trusted receiver).  Eve's entropy comes from
    (nu1, nu2) of that state; her conditional entropy from the
    trusted-detector conditioning.  chi_E = 0 exactly for
    (tau=1, n=0, eps=0).
    """
    tau = ch.tau
    if not tau > 0.0:
        raise ValueError("holevo_bound requires tau > 0")
    v = p.v_mod + 1.0
    residual = _detection_noise(ch, p, noise)[3]
    eps_in = residual / (tau * p.eta_receiver)
    chi_line = (1.0 - tau) / tau * (2.0 * ch.n_thermal + 1.0) + eps_in
    a = v
    b = tau * (v + chi_line)
    c = math.sqrt(tau * (v * v - 1.0))

    delta = a * a + b * b - 2.0 * c * c
    det_gamma = (a * b - c * c) ** 2
    disc = math.sqrt(max(delta * delta - 4.0 * det_gamma, 0.0))
    # delta - disc cancels catastrophically as tau -> 1; snap the rounding
    # error back onto the vacuum boundary before the entropy domain check
    nu1 = _snap_to_vacuum(math.sqrt(max((delta + disc) / 2.0, 0.0)), delta)
    nu2 = _snap_to_vacuum(math.sqrt(max((delta - disc) / 2.0, 0.0)), delta)
    s_eve = bosonic_entropy(nu1) + bosonic_entropy(nu2)

    s_cond, nu_cond = _conditional_entropy_bits(a, b, c, p)
    chi = s_eve - s_cond
    if chi < -1e-9:
        raise ValueError(f"non-physical negative Holevo bound: {chi!r}")
    return max(chi, 0.0), (nu1, nu2) + nu_cond


@dataclass(frozen=True)
class CvDiagnostics:
    snr: float
    i_ab: float
    chi_e: float
    nu1: float
    nu2: float
    nu3: float
    displacement_amplitude: float
    nu_cond: tuple[float, ...] = ()


@dataclass(frozen=True)
class CvRateResult:
    key_rate: float
    classical_rate: float
    secure: bool
    diagnostics: CvDiagnostics

    def __post_init__(self) -> None:
        if self.key_rate < 0.0:
            raise ValueError("key rate is clamped at 0 and cannot be negative")
        if self.diagnostics.chi_e < 0.0:
            raise ValueError("Holevo bound cannot be negative")


def aep_correction(p: CvProtocolParams) -> float:
    """Asymptotic-equipartition penalty coefficient Delta_aep."""
    return (
        4.0
        * math.log2(2.0 ** (p.d_bits / 2.0) + 2.0)
        * math.sqrt(math.log2(18.0 / (p.p_ec**2 * p.eps_sec**4)))
    )


def theta_correction(p: CvProtocolParams) -> float:
    """Order-(1/n) composable correction Theta."""
    return math.log2(p.p_ec * (1.0 - p.eps_sec**2 / 3.0)) + 2.0 * math.log2(
        math.sqrt(2.0) * p.eps_hash
    )


def composable_key_rate(
    ch: ThermalLossChannel,
    p: CvProtocolParams,
    noise: PhaseEncodingNoise,
    block_size_n: float = math.inf,
) -> CvRateResult:
    """Composable key rate in bits/use together with the classical rate.

    Finite blocks reserve half the rounds for parameter estimation
    (n = N/2) and pay the asymptotic-equipartition and hashing
    corrections:

        R = p_ec (n/N) [beta I_raw - chi_E - Delta_aep/sqrt(n) - Theta/n]

    The asymptotic case keeps only p_ec (beta I_raw - chi_E).
    """
    if not block_size_n > 0:
        raise ValueError(f"block size must be > 0: {block_size_n!r}")
    if ch.tau == 0.0:
        diag = CvDiagnostics(
            snr=0.0, i_ab=0.0, chi_e=0.0, nu1=1.0, nu2=1.0, nu3=1.0,
            displacement_amplitude=math.inf,
        )
        return CvRateResult(key_rate=0.0, classical_rate=0.0, secure=False, diagnostics=diag)

    snr = channel_snr(ch, p, noise)
    i_raw = 0.5 * math.log2(1.0 + snr)
    chi_e, nus = holevo_bound(ch, p, noise)
    delta = classical_displacement(ch, p, noise)

    bracket = p.beta * i_raw - chi_e
    if math.isinf(block_size_n):
        rate = p.p_ec * bracket
    else:
        n_key = block_size_n / 2.0
        bracket = (
            bracket
            - aep_correction(p) / math.sqrt(n_key)
            - theta_correction(p) / n_key
        )
        rate = p.p_ec * (n_key / block_size_n) * bracket

    diag = CvDiagnostics(
        snr=snr,
        i_ab=i_raw,
        chi_e=chi_e,
        nu1=nus[0],
        nu2=nus[1],
        nu3=nus[2],
        displacement_amplitude=delta,
        nu_cond=nus[2:],
    )
    return CvRateResult(
        key_rate=max(rate, 0.0),
        classical_rate=p.beta * i_raw,
        secure=bracket > 0.0,
        diagnostics=diag,
    )
