"""Flat key-value configuration files shared by the parameter and data catalogs.

Format: one ``name = value`` per line, ``#`` starts a comment, blank lines are
ignored.  Dotted keys group related settings (``phi1.kind = odd_gaussian``).
"""

from __future__ import annotations

from pathlib import Path

from .datagen import DataSpec, DataTriple
from .params import PhysicalParams


class ConfigError(ValueError):
    """Malformed configuration text or unusable key set."""


def parse_kv(text: str) -> dict[str, str]:
    """Parse flat ``name = value`` lines into a string dictionary."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'name = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value in {raw!r}")
        out[key] = value
    return out


def load_kv(path: str | Path) -> dict[str, str]:
    return parse_kv(Path(path).read_text())


def _get_float(kv: dict[str, str], key: str) -> float | None:
    if key not in kv:
        return None
    try:
        return float(kv[key])
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: not a number: {kv[key]!r}") from exc


_PARAM_KEYS = {
    "c0",
    "gamma",
    "beta",
    "nu0",
    "D_th",
    "alpha_p",
    "n",
    "rho0",
    "kappa_T",
    "cP",
    "cV",
    "eta_s",
    "eta_b",
}


def params_from_kv(kv: dict[str, str]) -> PhysicalParams:
    """Build a parameter set from configuration keys.

    Missing derived-group entries are filled from the primitives when
    possible (c0 from rho0/kappa_T, gamma from cP/cV, beta from eta ratios).
    """
    values = {k: _get_float(kv, k) for k in _PARAM_KEYS if k in kv}

    c0 = values.get("c0")
    if c0 is None and values.get("rho0") is not None and values.get("kappa_T") is not None:
        c0 = 1.0 / (values["rho0"] * values["kappa_T"]) ** 0.5
    gamma = values.get("gamma")
    if gamma is None and values.get("cP") is not None and values.get("cV") is not None:
        gamma = values["cP"] / values["cV"]
    beta = values.get("beta")
    if beta is None and values.get("eta_s") is not None and values.get("eta_b") is not None:
        beta = values["eta_b"] / values["eta_s"] + 1.0 / 3.0

    missing = [
        name
        for name, value in (
            ("c0", c0),
            ("gamma", gamma),
            ("beta", beta),
            ("nu0", values.get("nu0")),
            ("D_th", values.get("D_th")),
            ("alpha_p", values.get("alpha_p")),
        )
        if value is None
    ]
    if missing:
        raise ConfigError(f"missing parameter keys (or primitives to derive them): {missing}")

    n = int(values["n"]) if values.get("n") is not None else 2
    return PhysicalParams(
        c0=c0,
        gamma=gamma,
        beta=beta,
        nu0=values["nu0"],
        D_th=values["D_th"],
        alpha_p=values["alpha_p"],
        n=n,
        rho0=values.get("rho0"),
        kappa_T=values.get("kappa_T"),
        cP=values.get("cP"),
        cV=values.get("cV"),
        eta_s=values.get("eta_s"),
        eta_b=values.get("eta_b"),
    )


def dataspec_from_kv(kv: dict[str, str], prefix: str) -> DataSpec | None:
    """Read one datum specification under ``prefix.*`` keys; None when absent."""
    kind_key = f"{prefix}.kind"
    if kind_key not in kv:
        return None
    kind = kv[kind_key].strip().lower()
    width = _get_float(kv, f"{prefix}.width")
    amplitude = _get_float(kv, f"{prefix}.amplitude")
    kwargs = {}
    if width is not None:
        kwargs["width"] = width
    if amplitude is not None:
        kwargs["amplitude"] = amplitude
    if kind == "gaussian":
        return DataSpec.gaussian(**kwargs)
    if kind == "odd_gaussian":
        axis = kv.get(f"{prefix}.axis")
        if axis is not None:
            kwargs["axis"] = int(axis)
        return DataSpec.odd_gaussian(**kwargs)
    if kind == "shifted_gaussian":
        shift_text = kv.get(f"{prefix}.shift")
        if shift_text is None:
            raise ConfigError(f"{prefix}.shift required for shifted_gaussian")
        shift = tuple(float(part) for part in shift_text.replace(",", " ").split())
        return DataSpec.shifted_gaussian(shift=shift, **kwargs)
    raise ConfigError(f"unknown data kind {kv[kind_key]!r} for {prefix!r}")


def data_from_kv(kv: dict[str, str]) -> DataTriple:
    """Assemble the (phi0, phi1, T0) catalog entries from a configuration."""
    return DataTriple(
        phi0=dataspec_from_kv(kv, "phi0"),
        phi1=dataspec_from_kv(kv, "phi1"),
        T0=dataspec_from_kv(kv, "T0"),
    )
