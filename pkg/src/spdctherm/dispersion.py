"""Refractive-index models for the KTP isomorph family.

Each crystal axis is described by a Sellmeier law plus a two-term
thermo-optic correction,

    n(lam, T) = sqrt(n2_sellmeier(lam)) + n1(lam) (T - t0) + n2(lam) (T - t0)^2

with n1, n2 Laurent polynomials sum_j a_j / lam^j (lam in um).  Models are
loaded from a JSON database and validated once; evaluation outside the
declared wavelength or temperature range is an error, never an
extrapolation.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .constants import TWO_PI


class DispersionError(Exception):
    """Base class for dispersion-layer failures."""


class ParseError(DispersionError):
    """Raised when a coefficient database file is malformed."""


class RangeError(DispersionError):
    """Raised when a model is evaluated outside its validity range."""


class CrystalId(str, enum.Enum):
    KTP = "KTP"
    RTP = "RTP"
    KTA = "KTA"
    RTA = "RTA"
    CTA = "CTA"

    @classmethod
    def parse(cls, name: str) -> "CrystalId":
        try:
            return cls(name.upper())
        except ValueError:
            valid = ", ".join(c.value for c in cls)
            raise ParseError(f"unknown crystal {name!r}; valid: {valid}") from None


class OpticalAxis(str, enum.Enum):
    X = "x"
    Y = "y"
    Z = "z"

    @classmethod
    def parse(cls, name: str) -> "OpticalAxis":
        try:
            return cls(name.lower())
        except ValueError:
            raise ParseError(f"unknown axis {name!r}; valid: x, y, z") from None


_FORMS = ("pole", "ratio")


@dataclass(frozen=True)
class SellmeierForm:
    """Closed-form n^2(lam) law.

    pole:  n^2 = A + B/(lam^2 - C) + D/(lam^2 - E) - F lam^2
    ratio: n^2 = A + B/(1 - C/lam^2) + D/(1 - E/lam^2) - F lam^2

    C and E are squared pole wavelengths (um^2); a term is disabled by a
    zero B or D coefficient.
    """

    form: str
    coeffs: tuple  # (A, B, C, D, E, F)

    def n_sq(self, lam):
        a, b, c, d, e, f = self.coeffs
        lam2 = np.asarray(lam) ** 2
        if self.form == "pole":
            val = a - f * lam2
            if b:
                val = val + b / (lam2 - c)
            if d:
                val = val + d / (lam2 - e)
        else:
            val = a - f * lam2
            if b:
                val = val + b / (1.0 - c / lam2)
            if d:
                val = val + d / (1.0 - e / lam2)
        return val

    def dn_sq_dlambda(self, lam):
        """Analytic d(n^2)/dlam."""
        a, b, c, d, e, f = self.coeffs
        lam = np.asarray(lam)
        lam2 = lam**2
        val = -2.0 * f * lam
        if self.form == "pole":
            if b:
                val = val - 2.0 * lam * b / (lam2 - c) ** 2
            if d:
                val = val - 2.0 * lam * d / (lam2 - e) ** 2
        else:
            if b:
                val = val - 2.0 * b * c / (lam**3 * (1.0 - c / lam2) ** 2)
            if d:
                val = val - 2.0 * d * e / (lam**3 * (1.0 - e / lam2) ** 2)
        return val

    def poles_sq(self) -> list:
        """Squared pole positions of enabled terms (um^2)."""
        a, b, c, d, e, f = self.coeffs
        out = []
        if b:
            out.append(c)
        if d:
            out.append(e)
        return out


@dataclass(frozen=True)
class ThermoOpticModel:
    """Two-term polynomial temperature correction around t0 (degC)."""

    t0: float
    order1: tuple  # (a0, a1, a2, a3): n1(lam) = sum a_j / lam^j
    order2: tuple

    @staticmethod
    def _laurent(coeffs, lam):
        a0, a1, a2, a3 = coeffs
        return a0 + a1 / lam + a2 / lam**2 + a3 / lam**3

    @staticmethod
    def _dlaurent(coeffs, lam):
        a0, a1, a2, a3 = coeffs
        return -a1 / lam**2 - 2.0 * a2 / lam**3 - 3.0 * a3 / lam**4

    def delta_n(self, lam, temp):
        dt = temp - self.t0
        if dt == 0.0:
            return np.zeros_like(np.asarray(lam, dtype=float))
        lam = np.asarray(lam)
        return self._laurent(self.order1, lam) * dt + self._laurent(self.order2, lam) * dt**2

    def d_delta_n_dlambda(self, lam, temp):
        dt = temp - self.t0
        if dt == 0.0:
            return np.zeros_like(np.asarray(lam, dtype=float))
        lam = np.asarray(lam)
        return self._dlaurent(self.order1, lam) * dt + self._dlaurent(self.order2, lam) * dt**2


@dataclass(frozen=True)
class DispersionModel:
    """One crystal axis's refractive-index law with validity ranges."""

    crystal: CrystalId
    axis: OpticalAxis
    sellmeier: SellmeierForm
    thermo: ThermoOpticModel
    lambda_range: tuple  # (lo, hi) um
    temp_range: tuple  # (lo, hi) degC
    source: str
    default: bool = False

    def _check(self, lam, temp: float) -> None:
        lo, hi = self.lambda_range
        lam = np.asarray(lam)
        lmin = float(lam.min())
        lmax = float(lam.max())
        if lmin < lo or lmax > hi:
            raise RangeError(
                f"{self.crystal.value} {self.axis.value}-axis: wavelength "
                f"[{lmin:.4f}, {lmax:.4f}] um outside validity range [{lo}, {hi}] um"
            )
        tlo, thi = self.temp_range
        if temp < tlo or temp > thi:
            raise RangeError(
                f"{self.crystal.value} {self.axis.value}-axis: temperature "
                f"{temp:.2f} C outside validity range [{tlo}, {thi}] C"
            )

    def refractive_index(self, lam, temp: float):
        """n(lam, T); lam in um, temp in degC."""
        self._check(lam, temp)
        n = np.sqrt(self.sellmeier.n_sq(lam)) + self.thermo.delta_n(lam, temp)
        return n if np.ndim(lam) else float(n)

    def dn_dlambda(self, lam, temp: float):
        """Analytic dn/dlam (um^-1)."""
        self._check(lam, temp)
        n_sq = self.sellmeier.n_sq(lam)
        val = self.sellmeier.dn_sq_dlambda(lam) / (2.0 * np.sqrt(n_sq))
        val = val + self.thermo.d_delta_n_dlambda(lam, temp)
        return val if np.ndim(lam) else float(val)

    def inverse_group_velocity(self, lam, temp: float):
        """Group index n_g = n - lam dn/dlam, i.e. c / V_g (dimensionless)."""
        self._check(lam, temp)
        n_sq = self.sellmeier.n_sq(lam)
        n = np.sqrt(n_sq) + self.thermo.delta_n(lam, temp)
        dn = self.sellmeier.dn_sq_dlambda(lam) / (2.0 * np.sqrt(n_sq))
        dn = dn + self.thermo.d_delta_n_dlambda(lam, temp)
        val = n - np.asarray(lam) * dn
        return val if np.ndim(lam) else float(val)

    def wave_number(self, lam, temp: float):
        """k = 2 pi n / lam (rad/um)."""
        n = self.refractive_index(lam, temp)
        return TWO_PI * n / np.asarray(lam) if np.ndim(lam) else TWO_PI * n / lam


_MODEL_KEYS = {
    "crystal",
    "axis",
    "form",
    "coeffs",
    "t0_celsius",
    "thermo_order1",
    "thermo_order2",
    "lambda_range_um",
    "temp_range_c",
    "source",
    "default",
}

_TOP_KEYS = {"schema_version", "models"}


class CoefficientDatabase:
    """Immutable collection of dispersion models keyed by (crystal, axis, source)."""

    def __init__(self, models):
        self._models = dict(models)
        self._defaults = {}
        for (crystal, axis, _src), model in self._models.items():
            if model.default:
                self._defaults[(crystal, axis)] = model

    def __len__(self) -> int:
        return len(self._models)

    def __iter__(self):
        return iter(self._models.values())

    def model(self, crystal, axis, source: str | None = None) -> DispersionModel:
        crystal = CrystalId.parse(crystal) if isinstance(crystal, str) else crystal
        axis = OpticalAxis.parse(axis) if isinstance(axis, str) else axis
        if source is None:
            try:
                return self._defaults[(crystal, axis)]
            except KeyError:
                raise ParseError(
                    f"no default model for ({crystal.value}, {axis.value})"
                ) from None
        hits = [
            m
            for (c, a, src), m in self._models.items()
            if c == crystal and a == axis and source.lower() in src.lower()
        ]
        if not hits:
            raise ParseError(
                f"no model for ({crystal.value}, {axis.value}) matching source {source!r}"
            )
        if len(hits) > 1:
            tags = "; ".join(m.source for m in hits)
            raise ParseError(
                f"ambiguous source {source!r} for ({crystal.value}, {axis.value}): {tags}"
            )
        return hits[0]


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParseError(message)


def _parse_model(obj: dict, index: int) -> DispersionModel:
    where = f"models[{index}]"
    _require(isinstance(obj, dict), f"{where}: expected object")
    unknown = set(obj) - _MODEL_KEYS
    _require(not unknown, f"{where}: unknown keys {sorted(unknown)}")
    missing = _MODEL_KEYS - set(obj)
    _require(not missing, f"{where}: missing keys {sorted(missing)}")

    crystal = CrystalId.parse(obj["crystal"])
    axis = OpticalAxis.parse(obj["axis"])
    _require(obj["form"] in _FORMS, f"{where}: form must be one of {_FORMS}")
    coeffs = obj["coeffs"]
    _require(
        isinstance(coeffs, list) and len(coeffs) == 6,
        f"{where}: coeffs must be a 6-element array [A,B,C,D,E,F]",
    )
    for key in ("thermo_order1", "thermo_order2"):
        _require(
            isinstance(obj[key], list) and len(obj[key]) == 4,
            f"{where}: {key} must be a 4-element array [a0,a1,a2,a3]",
        )
    lam_range = obj["lambda_range_um"]
    _require(
        isinstance(lam_range, list) and len(lam_range) == 2 and 0 < lam_range[0] < lam_range[1],
        f"{where}: lambda_range_um must be [lo, hi] with 0 < lo < hi",
    )
    temp_range = obj["temp_range_c"]
    _require(
        isinstance(temp_range, list) and len(temp_range) == 2 and temp_range[0] < temp_range[1],
        f"{where}: temp_range_c must be [lo, hi] with lo < hi",
    )
    _require(isinstance(obj["source"], str) and obj["source"], f"{where}: source must be a non-empty string")
    _require(isinstance(obj["default"], bool), f"{where}: default must be boolean")

    sellmeier = SellmeierForm(form=obj["form"], coeffs=tuple(float(v) for v in coeffs))
    thermo = ThermoOpticModel(
        t0=float(obj["t0_celsius"]),
        order1=tuple(float(v) for v in obj["thermo_order1"]),
        order2=tuple(float(v) for v in obj["thermo_order2"]),
    )
    model = DispersionModel(
        crystal=crystal,
        axis=axis,
        sellmeier=sellmeier,
        thermo=thermo,
        lambda_range=(float(lam_range[0]), float(lam_range[1])),
        temp_range=(float(temp_range[0]), float(temp_range[1])),
        source=obj["source"],
        default=obj["default"],
    )

    lo, hi = model.lambda_range
    for pole in sellmeier.poles_sq():
        _require(
            not (lo**2 <= pole <= hi**2),
            f"{where}: Sellmeier pole at {pole} um^2 lies inside the validity "
            f"range [{lo**2:.4g}, {hi**2:.4g}] um^2",
        )
    sample = np.linspace(lo, hi, 64)
    n_sq = sellmeier.n_sq(sample)
    _require(
        bool(np.all(n_sq > 1.0)),
        f"{where}: n^2 <= 1 somewhere inside the validity range",
    )
    return model


def parse_database(text: str) -> CoefficientDatabase:
    """Parse and validate a JSON coefficient database."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    _require(isinstance(doc, dict), "top level must be an object")
    unknown = set(doc) - _TOP_KEYS
    _require(not unknown, f"unknown top-level keys {sorted(unknown)}")
    _require(doc.get("schema_version") == 1, "schema_version must be 1")
    _require(isinstance(doc.get("models"), list), "models must be an array")

    models = {}
    for i, obj in enumerate(doc["models"]):
        model = _parse_model(obj, i)
        key = (model.crystal, model.axis, model.source)
        _require(
            key not in models,
            f"models[{i}]: duplicate (crystal, axis, source) key "
            f"({model.crystal.value}, {model.axis.value}, {model.source!r})",
        )
        models[key] = model

    for crystal in CrystalId:
        for axis in (OpticalAxis.Y, OpticalAxis.Z):
            defaults = [
                m
                for (c, a, _s), m in models.items()
                if c == crystal and a == axis and m.default
            ]
            _require(
                len(defaults) == 1,
                f"database must contain exactly one default model for "
                f"({crystal.value}, {axis.value}); found {len(defaults)}",
            )
    return CoefficientDatabase(models)


def serialize_database(db: CoefficientDatabase) -> str:
    """Serialize back to the schema; round-trips bit-for-bit through parse."""
    models = []
    for model in db:
        models.append(
            {
                "crystal": model.crystal.value,
                "axis": model.axis.value,
                "form": model.sellmeier.form,
                "coeffs": list(model.sellmeier.coeffs),
                "t0_celsius": model.thermo.t0,
                "thermo_order1": list(model.thermo.order1),
                "thermo_order2": list(model.thermo.order2),
                "lambda_range_um": list(model.lambda_range),
                "temp_range_c": list(model.temp_range),
                "source": model.source,
                "default": model.default,
            }
        )
    return json.dumps({"schema_version": 1, "models": models}, indent=2) + "\n"


def default_database_path() -> Path:
    """Path of the coefficient database bundled with the package."""
    return Path(resources.files("spdctherm") / "data" / "coefficients.json")


def load_database(path: str | Path | None = None) -> CoefficientDatabase:
    """Load a database file; the bundled one when no path is given."""
    p = Path(path) if path is not None else default_database_path()
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read database {p}: {exc}") from None
    try:
        return parse_database(text)
    except ParseError as exc:
        raise ParseError(f"{p}: {exc}") from None
