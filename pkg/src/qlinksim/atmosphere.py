"""Gas attenuation and thermal background for slant paths through the atmosphere.

Implements the line-by-line specific attenuation of Rec. ITU-R P.676
Annex 1 (44 oxygen lines, 35 water-vapour lines, dry-air continuum),
numerical integration of that attenuation along straight slant rays
through a mean annual global reference atmosphere (Rec. ITU-R P.835
style), and the Bose-Einstein mean thermal photon occupancy.

The spectroscopic coefficients ship as plain-text data files whose
SHA-256 digests are verified at load time against a bundled manifest.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from .mathfn import CONSTANTS

__all__ = [
    "AtmosphericState",
    "ReferenceAtmosphereProfile",
    "SpectralLineTable",
    "SlantPathSpec",
    "ThermalOccupancyQuery",
    "default_line_table",
    "specific_attenuation",
    "attenuation_spectrum",
    "slant_attenuation",
    "slant_attenuation_spectrum",
    "thermal_photon_number",
]

FREQ_MIN_GHZ = 1.0
FREQ_MAX_GHZ = 1000.0

# integration ceiling: absorber densities above this altitude contribute
# nothing at the accuracy targets of this model
TOP_ALTITUDE_KM = 100.0


@dataclass(frozen=True)
class AtmosphericState:
    """Local thermodynamic state of moist air.

    Parameters
    ----------
    temperature_k : float
        Temperature in kelvin, > 0.
    pressure_hpa : float
        Total (dry + vapour) barometric pressure in hPa, >= 0.
    water_vapor_density_g_m3 : float
        Water-vapour density in g/m^3, >= 0.
    """

    temperature_k: float
    pressure_hpa: float
    water_vapor_density_g_m3: float

    def __post_init__(self) -> None:
        if not self.temperature_k > 0.0:
            raise ValueError(f"temperature must be > 0 K: {self.temperature_k!r}")
        if self.pressure_hpa < 0.0:
            raise ValueError(f"pressure must be >= 0 hPa: {self.pressure_hpa!r}")
        if self.water_vapor_density_g_m3 < 0.0:
            raise ValueError(
                f"water vapour density must be >= 0: {self.water_vapor_density_g_m3!r}"
            )

    @property
    def water_vapor_pressure_hpa(self) -> float:
        """Partial pressure of water vapour, e = rho * T / 216.7."""
        return self.water_vapor_density_g_m3 * self.temperature_k / 216.7


def _read_checked(name: str) -> bytes:
    data_dir = resources.files(__package__) / "data"
    raw = (data_dir / name).read_bytes()
    expected = None
    for line in (data_dir / "MANIFEST.sha256").read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        digest, fname = line.split()
        if fname == name:
            expected = digest
    if expected is None:
        raise ValueError(f"no manifest entry for data file {name!r}")
    actual = hashlib.sha256(raw).hexdigest()
    if actual != expected:
        raise ValueError(
            f"checksum mismatch for data file {name!r}: manifest {expected}, got {actual}"
        )
    return raw


def _parse_line_table(raw: bytes, n_cols: int) -> np.ndarray:
    rows = []
    for line in raw.decode("ascii").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        values = [float(tok) for tok in line.split()]
        if len(values) != n_cols:
            raise ValueError(f"malformed spectral-line row: {line!r}")
        rows.append(values)
    return np.array(rows, dtype=float)


@dataclass(frozen=True, eq=False)
class SpectralLineTable:
    """Oxygen and water-vapour resonance-line coefficients.

    Each row holds a line center frequency (GHz) followed by the six
    strength/width/interference coefficients of Rec. ITU-R P.676 Annex 1.
    """

    oxygen: np.ndarray
    water: np.ndarray

    def __post_init__(self) -> None:
        if self.oxygen.shape != (44, 7):
            raise ValueError(f"expected 44 oxygen lines x 7 columns: {self.oxygen.shape}")
        if self.water.shape != (35, 7):
            raise ValueError(f"expected 35 water lines x 7 columns: {self.water.shape}")
        for name, table in (("oxygen", self.oxygen), ("water", self.water)):
            centers = table[:, 0]
            if not np.all(np.diff(centers) > 0.0):
                raise ValueError(f"{name} line centers must be strictly increasing")

    @classmethod
    def load_bundled(cls) -> "SpectralLineTable":
        """Load the bundled coefficient files, verifying their checksums."""
        oxygen = _parse_line_table(_read_checked("oxygen_lines.txt"), 7)
        water = _parse_line_table(_read_checked("water_lines.txt"), 7)
        return cls(oxygen=oxygen, water=water)


@lru_cache(maxsize=1)
def default_line_table() -> SpectralLineTable:
    return SpectralLineTable.load_bundled()


# ---------------------------------------------------------------------------
# reference atmosphere (mean annual global, Rec. ITU-R P.835 style)
# ---------------------------------------------------------------------------

_GEOPOT_RADIUS_KM = 6356.766
_G_OVER_R = 34.1632  # K/km' : gravity over specific gas constant of dry air
# (geopotential base altitude km', lapse rate K/km') up to 84.852 km'
_LAYERS = (
    (0.0, -6.5),
    (11.0, 0.0),
    (20.0, 1.0),
    (32.0, 2.8),
    (47.0, 0.0),
    (51.0, -2.8),
    (71.0, -2.0),
)
_LAYER_TOP_KM_PRIME = 84.852
# high-altitude pressure fit ln P = sum a_i h^i for 86-100 km geometric
_HIGH_P_COEFF = (95.571899, -4.011801, 6.424731e-2, -4.789660e-4, 1.340543e-6)

SURFACE_TEMPERATURE_K = 288.15
SURFACE_PRESSURE_HPA = 1013.25
SURFACE_WATER_VAPOR_G_M3 = 7.5
_WATER_SCALE_HEIGHT_KM = 2.0
_MIN_MIXING_RATIO = 2.0e-6  # floor on e/P at high altitude


def _layer_bases() -> tuple[tuple[float, float, float, float], ...]:
    # (base altitude km', lapse, base temperature, base pressure) per layer,
    # derived recursively from the surface values so the piecewise closed
    # forms are continuous by construction
    bases = []
    t, p = SURFACE_TEMPERATURE_K, SURFACE_PRESSURE_HPA
    for i, (hb, lapse) in enumerate(_LAYERS):
        bases.append((hb, lapse, t, p))
        h_next = _LAYERS[i + 1][0] if i + 1 < len(_LAYERS) else _LAYER_TOP_KM_PRIME
        dh = h_next - hb
        if lapse == 0.0:
            p = p * math.exp(-_G_OVER_R * dh / t)
        else:
            t_next = t + lapse * dh
            p = p * (t / t_next) ** (_G_OVER_R / lapse)
            t = t_next
    return tuple(bases)


_LAYER_BASES = _layer_bases()


def _standard_t_p(h_km: float) -> tuple[float, float]:
    """Temperature (K) and pressure (hPa) of the mean annual global profile."""
    h_km = min(h_km, TOP_ALTITUDE_KM)
    if h_km <= 86.0:
        hp = _GEOPOT_RADIUS_KM * h_km / (_GEOPOT_RADIUS_KM + h_km)
        hp = min(hp, _LAYER_TOP_KM_PRIME)
        base = _LAYER_BASES[0]
        for cand in _LAYER_BASES:
            if hp >= cand[0]:
                base = cand
        hb, lapse, tb, pb = base
        if lapse == 0.0:
            return tb, pb * math.exp(-_G_OVER_R * (hp - hb) / tb)
        t = tb + lapse * (hp - hb)
        return t, pb * (tb / t) ** (_G_OVER_R / lapse)
    if h_km <= 91.0:
        t = 186.8673
    else:
        t = 263.1905 - 76.3232 * math.sqrt(max(0.0, 1.0 - ((h_km - 91.0) / 19.9429) ** 2))
    a0, a1, a2, a3, a4 = _HIGH_P_COEFF
    p = math.exp(a0 + a1 * h_km + a2 * h_km**2 + a3 * h_km**3 + a4 * h_km**4)
    return t, p


@dataclass(frozen=True, eq=False)
class ReferenceAtmosphereProfile:
    """Layered altitude table of atmospheric state with interpolation.

    Temperature interpolates linearly in altitude between nodes; pressure
    and water-vapour density interpolate exponentially (linearly in log)
    wherever the node values are strictly positive, falling back to
    linear interpolation otherwise.
    """

    altitude_km: np.ndarray
    temperature_k: np.ndarray
    pressure_hpa: np.ndarray
    water_vapor_g_m3: np.ndarray

    def __post_init__(self) -> None:
        n = self.altitude_km.shape[0]
        for name in ("temperature_k", "pressure_hpa", "water_vapor_g_m3"):
            if getattr(self, name).shape != (n,):
                raise ValueError("profile columns must share one length")
        if n < 2:
            raise ValueError("profile needs at least two nodes")
        if not np.all(np.diff(self.altitude_km) > 0.0):
            raise ValueError("profile altitudes must be strictly increasing")
        if self.altitude_km[0] != 0.0:
            raise ValueError("profile must start at altitude 0 km")
        if self.altitude_km[-1] < TOP_ALTITUDE_KM:
            raise ValueError(f"profile must reach {TOP_ALTITUDE_KM} km")
        if not np.all(self.temperature_k > 0.0):
            raise ValueError("profile temperatures must be > 0 K")
        if np.any(self.pressure_hpa < 0.0) or np.any(self.water_vapor_g_m3 < 0.0):
            raise ValueError("profile pressures and densities must be >= 0")
        if np.any(np.diff(self.pressure_hpa) > 0.0):
            raise ValueError("profile pressure must be non-increasing with altitude")

    @classmethod
    def mean_annual_global(cls) -> "ReferenceAtmosphereProfile":
        """Reference profile with 1 km nodes from 0 to 100 km.

        Surface values 288.15 K, 1013.25 hPa, 7.5 g/m^3; water vapour
        decays with a 2 km scale height down to a mixing-ratio floor of
        e/P = 2e-6.
        """
        alts = np.arange(0.0, TOP_ALTITUDE_KM + 0.5, 1.0)
        t = np.empty_like(alts)
        p = np.empty_like(alts)
        rho = np.empty_like(alts)
        for i, h in enumerate(alts):
            t[i], p[i] = _standard_t_p(float(h))
            rho_exp = SURFACE_WATER_VAPOR_G_M3 * math.exp(-h / _WATER_SCALE_HEIGHT_KM)
            rho_floor = 216.7 * _MIN_MIXING_RATIO * p[i] / t[i]
            rho[i] = max(rho_exp, rho_floor)
        return cls(altitude_km=alts, temperature_k=t, pressure_hpa=p, water_vapor_g_m3=rho)

    @classmethod
    def from_rows(cls, rows) -> "ReferenceAtmosphereProfile":
        """Build a profile from (altitude_km, T_k, P_hpa, rho_g_m3) rows."""
        arr = np.array([[float(v) for v in row] for row in rows], dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 4:
            raise ValueError("profile rows must have four columns")
        return cls(
            altitude_km=arr[:, 0],
            temperature_k=arr[:, 1],
            pressure_hpa=arr[:, 2],
            water_vapor_g_m3=arr[:, 3],
        )

    def states_at(self, h_km: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized (T, P, rho) at the requested altitudes."""
        h = np.asarray(h_km, dtype=float)
        if np.any(h < 0.0) or np.any(h > self.altitude_km[-1]):
            raise ValueError("altitude outside profile range")
        t = np.interp(h, self.altitude_km, self.temperature_k)

        def _interp_pos(values: np.ndarray) -> np.ndarray:
            if np.all(values > 0.0):
                return np.exp(np.interp(h, self.altitude_km, np.log(values)))
            return np.interp(h, self.altitude_km, values)

        return t, _interp_pos(self.pressure_hpa), _interp_pos(self.water_vapor_g_m3)

    def state_at(self, h_km: float) -> AtmosphericState:
        t, p, rho = self.states_at(np.array([h_km]))
        return AtmosphericState(
            temperature_k=float(t[0]),
            pressure_hpa=float(p[0]),
            water_vapor_density_g_m3=float(rho[0]),
        )


@lru_cache(maxsize=1)
def default_profile() -> ReferenceAtmosphereProfile:
    return ReferenceAtmosphereProfile.mean_annual_global()


# ---------------------------------------------------------------------------
# line-by-line specific attenuation
# ---------------------------------------------------------------------------


def _gamma_grid(
    f_ghz: np.ndarray,
    t_k: np.ndarray,
    p_total_hpa: np.ndarray,
    rho_g_m3: np.ndarray,
    table: SpectralLineTable,
) -> np.ndarray:
    """Specific attenuation in dB/km, shape (len(f), len(states)).

    Van Vleck-Weisskopf line shapes with pressure-induced interference
    for oxygen, Doppler-broadened shapes for water vapour, plus the
    non-resonant Debye / pressure-induced nitrogen continuum.
    """
    f = np.asarray(f_ghz, dtype=float)[:, None]  # (nf, 1)
    t = np.asarray(t_k, dtype=float)[None, :]  # (1, ns)
    theta = 300.0 / t
    e = np.asarray(rho_g_m3, dtype=float)[None, :] * t / 216.7
    # the recommendation parametrizes widths with the dry-air partial pressure
    p = np.maximum(np.asarray(p_total_hpa, dtype=float)[None, :] - e, 0.0)

    n_total = np.zeros(np.broadcast_shapes(f.shape, t.shape), dtype=float)

    for fi, a1, a2, a3, a4, a5, a6 in table.oxygen:
        si = a1 * 1e-7 * p * theta**3 * np.exp(a2 * (1.0 - theta))
        df = a3 * 1e-4 * (p * theta ** (0.8 - a4) + 1.1 * e * theta)
        df = np.sqrt(df * df + 2.25e-6)  # Zeeman/Doppler floor
        delta = (a5 + a6 * theta) * 1e-4 * (p + e) * theta**0.8
        shape = (df - delta * (fi - f)) / ((fi - f) ** 2 + df * df) + (
            df - delta * (fi + f)
        ) / ((fi + f) ** 2 + df * df)
        n_total += si * (f / fi) * shape

    # dry continuum: Debye spectrum of oxygen plus pressure-induced nitrogen
    d = 5.6e-4 * (p + e) * theta**0.8
    n_total += (
        f
        * p
        * theta**2
        * (
            6.14e-5 / (d * (1.0 + (f / d) ** 2))
            + 1.4e-12 * p * theta**1.5 / (1.0 + 1.9e-5 * f**1.5)
        )
    )

    for fi, b1, b2, b3, b4, b5, b6 in table.water:
        si = b1 * 1e-1 * e * theta**3.5 * np.exp(b2 * (1.0 - theta))
        df = b3 * 1e-4 * (p * theta**b4 + b5 * e * theta**b6)
        df = 0.535 * df + np.sqrt(0.217 * df * df + 2.1316e-12 * fi * fi / theta)
        shape = df / ((fi - f) ** 2 + df * df) + df / ((fi + f) ** 2 + df * df)
        n_total += si * (f / fi) * shape

    return np.maximum(0.1820 * f * n_total, 0.0)


def _check_freq(frequency_ghz: np.ndarray | float) -> None:
    f = np.asarray(frequency_ghz, dtype=float)
    if np.any(f < FREQ_MIN_GHZ) or np.any(f > FREQ_MAX_GHZ):
        raise ValueError(
            f"frequency must lie in [{FREQ_MIN_GHZ}, {FREQ_MAX_GHZ}] GHz: {frequency_ghz!r}"
        )


def specific_attenuation(
    frequency_ghz: float,
    state: AtmosphericState,
    table: SpectralLineTable | None = None,
) -> float:
    """Gaseous specific attenuation gamma(f) in dB/km at one state point."""
    _check_freq(frequency_ghz)
    table = table or default_line_table()
    grid = _gamma_grid(
        np.array([frequency_ghz]),
        np.array([state.temperature_k]),
        np.array([state.pressure_hpa]),
        np.array([state.water_vapor_density_g_m3]),
        table,
    )
    return float(grid[0, 0])


def attenuation_spectrum(
    frequency_ghz: np.ndarray,
    state: AtmosphericState,
    table: SpectralLineTable | None = None,
) -> np.ndarray:
    """Vectorized gamma(f) in dB/km at a fixed state."""
    _check_freq(frequency_ghz)
    table = table or default_line_table()
    grid = _gamma_grid(
        np.asarray(frequency_ghz, dtype=float),
        np.array([state.temperature_k]),
        np.array([state.pressure_hpa]),
        np.array([state.water_vapor_density_g_m3]),
        table,
    )
    return grid[:, 0]


# ---------------------------------------------------------------------------
# slant-path integration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SlantPathSpec:
    """Straight ray from a start altitude at a fixed elevation angle.

    The path altitude is h(s) = start + s * sin(elevation); contributions
    above 100 km are clipped to zero.
    """

    elevation_deg: float
    start_altitude_km: float = 0.0
    slant_distance_km: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.elevation_deg <= 90.0:
            raise ValueError(f"elevation must lie in (0, 90] deg: {self.elevation_deg!r}")
        if self.start_altitude_km < 0.0:
            raise ValueError(f"start altitude must be >= 0: {self.start_altitude_km!r}")
        if not self.slant_distance_km > 0.0:
            raise ValueError(f"slant distance must be > 0: {self.slant_distance_km!r}")


_FINE_STEP_KM = 0.1  # below 10 km altitude
_COARSE_STEP_KM = 1.0  # above 10 km altitude
_FINE_REGION_TOP_KM = 10.0


def _path_nodes(path: SlantPathSpec, step_scale: float) -> np.ndarray:
    """Integration nodes in path length, fine near the ground."""
    sin_el = math.sin(math.radians(path.elevation_deg))
    s_top = (TOP_ALTITUDE_KM - path.start_altitude_km) / sin_el
    s_end = min(path.slant_distance_km, s_top)
    if s_end <= 0.0:
        return np.zeros(1)
    segments = []
    if path.start_altitude_km < _FINE_REGION_TOP_KM:
        s_fine = min(s_end, (_FINE_REGION_TOP_KM - path.start_altitude_km) / sin_el)
        n = max(2, int(math.ceil(s_fine / (_FINE_STEP_KM * step_scale))) + 1)
        segments.append(np.linspace(0.0, s_fine, n))
        s_lo = s_fine
    else:
        s_lo = 0.0
        segments.append(np.zeros(1))
    if s_end > s_lo:
        n = max(2, int(math.ceil((s_end - s_lo) / (_COARSE_STEP_KM * step_scale))) + 1)
        segments.append(np.linspace(s_lo, s_end, n))
    nodes = np.unique(np.concatenate(segments))
    return nodes


def slant_attenuation_spectrum(
    path: SlantPathSpec,
    frequency_ghz: np.ndarray,
    profile: ReferenceAtmosphereProfile | None = None,
    table: SpectralLineTable | None = None,
    step_scale: float = 1.0,
) -> np.ndarray:
    """Total gas attenuation (dB) along the path, vectorized over frequency.

    Trapezoid rule over path-length nodes spaced at most 0.1 km below
    10 km altitude and 1 km above (scaled by ``step_scale``, which tests
    use for convergence checks).
    """
    _check_freq(frequency_ghz)
    if not step_scale > 0.0:
        raise ValueError("step_scale must be > 0")
    profile = profile or default_profile()
    table = table or default_line_table()
    f = np.asarray(frequency_ghz, dtype=float)
    if path.start_altitude_km >= TOP_ALTITUDE_KM:
        return np.zeros_like(f)
    nodes = _path_nodes(path, step_scale)
    if nodes.shape[0] < 2:
        return np.zeros_like(f)
    h = path.start_altitude_km + nodes * math.sin(math.radians(path.elevation_deg))
    h = np.clip(h, 0.0, TOP_ALTITUDE_KM)
    t, p, rho = profile.states_at(h)
    gamma = _gamma_grid(f, t, p, rho, table)  # (nf, ns)
    return np.trapezoid(gamma, nodes, axis=1)


def slant_attenuation(
    path: SlantPathSpec,
    frequency_ghz: float,
    profile: ReferenceAtmosphereProfile | None = None,
    table: SpectralLineTable | None = None,
    step_scale: float = 1.0,
) -> float:
    """Total gas attenuation in dB along a slant path at one frequency."""
    result = slant_attenuation_spectrum(
        path, np.array([frequency_ghz]), profile, table, step_scale
    )
    return float(result[0])


# ---------------------------------------------------------------------------
# thermal occupancy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThermalOccupancyQuery:
    frequency_hz: float
    temperature_k: float

    def __post_init__(self) -> None:
        if not self.frequency_hz > 0.0:
            raise ValueError(f"frequency must be > 0 Hz: {self.frequency_hz!r}")
        if not self.temperature_k > 0.0:
            raise ValueError(f"temperature must be > 0 K: {self.temperature_k!r}")

    @property
    def mean_photons(self) -> float:
        return thermal_photon_number(self.frequency_hz, self.temperature_k)


def thermal_photon_number(frequency_hz: float, temperature_k: float) -> float:
    """Bose-Einstein mean photon occupancy 1 / (exp(hf/kT) - 1)."""
    if not frequency_hz > 0.0:
        raise ValueError(f"frequency must be > 0 Hz: {frequency_hz!r}")
    if not temperature_k > 0.0:
        raise ValueError(f"temperature must be > 0 K: {temperature_k!r}")
    x = (
        CONSTANTS.planck_constant
        * frequency_hz
        / (CONSTANTS.boltzmann_constant * temperature_k)
    )
    if x > 700.0:
        # expm1 would overflow; occupancy is exp(-x) to double precision
        return math.exp(-x)
    return 1.0 / math.expm1(x)
