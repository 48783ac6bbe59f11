from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

from ..errors import InvalidConfigError

METHODS = ("newton", "reg2alpha", "gqt", "trust_region", "sd_goldstein", "royer_wright")


@dataclass
class MethodConfig:
    """Parameters for every method; only those relevant to ``method`` are read.

    ``gamma1`` is the omega increase factor for GQT and the radius increase
    factor for the trust region.  ``eta1`` is the acceptance threshold shared
    by the regularization and GQT methods.
    """

    method: str = "newton"
    eps: float = 1e-3
    budget: int = 100_000
    alpha: float = 1.0
    kappa_rg: float = 0.0
    # newton: M_k = lambda_coef * ||g_k||^(alpha/(1+alpha)) I
    lambda_coef: float = 0.0
    # (2+alpha)-regularization
    sigma0: float = 1.0
    sigma_min: float = 1e-8
    eta1: float = 0.01
    gamma_inc: float = 2.0
    gamma_dec: float = 2.0
    # GQT
    omega0: float = 1.0
    omega_min: float = 1e-8
    gamma1: float = 2.0
    residual_scale: float = 0.0
    # trust region
    delta0: float = 1.0
    delta_max: float = 10.0
    eta: float = 0.1
    eta_very: float = 0.75
    gamma2: float = 0.5
    # Goldstein linesearch
    mu1: float = 0.75
    mu2: float = 0.25
    # Royer-Wright
    eps_h: float | None = None
    rw_eta: float = 1.0
    backtrack: float = 0.5
    enforce_eps_h: bool = True

    def __post_init__(self):
        self.validate()

    @property
    def eps_H(self) -> float:
        return math.sqrt(self.eps) if self.eps_h is None else self.eps_h

    def validate(self) -> "MethodConfig":
        def need(cond, msg):
            if not cond:
                raise InvalidConfigError(f"{self.method}: {msg}")

        need(self.method in METHODS, f"unknown method, expected one of {METHODS}")
        need(self.eps > 0.0, "eps must be positive")
        need(int(self.budget) == self.budget and self.budget > 0, "budget must be a positive integer")
        need(0.0 <= self.kappa_rg < 1.0, "kappa_rg must lie in [0, 1)")
        m = self.method
        if m in ("newton", "reg2alpha", "gqt"):
            need(0.0 <= self.alpha <= 1.0, "alpha must lie in [0, 1]")
        if m == "newton":
            need(self.lambda_coef >= 0.0, "lambda_coef must be non-negative")
        if m == "reg2alpha":
            need(self.sigma_min > 0.0, "sigma_min must be positive")
            need(self.sigma0 >= self.sigma_min, "sigma0 must be at least sigma_min")
            need(0.0 < self.eta1 < 1.0, "eta1 must lie in (0, 1)")
            need(self.gamma_inc > 1.0, "gamma_inc must exceed 1")
            need(self.gamma_dec >= 1.0, "gamma_dec must be at least 1")
        if m == "gqt":
            need(0.0 < self.alpha <= 1.0, "GQT needs alpha in (0, 1]")
            need(self.omega_min > 0.0 and self.omega0 >= self.omega_min, "need omega0 >= omega_min > 0")
            need(self.gamma1 > 1.0, "gamma1 must exceed 1")
            need(0.0 < self.eta1 < 1.0, "eta1 must lie in (0, 1)")
            need(0.0 <= self.residual_scale <= self.kappa_rg, "residual_scale must lie in [0, kappa_rg]")
        if m == "trust_region":
            need(0.0 < self.delta0 <= self.delta_max, "need 0 < delta0 <= delta_max")
            need(0.0 < self.eta < 1.0, "eta must lie in (0, 1)")
            need(self.eta <= self.eta_very < 1.0, "eta_very must lie in [eta, 1)")
            need(self.gamma1 >= 1.0, "gamma1 must be at least 1")
            need(0.0 < self.gamma2 < 1.0, "gamma2 must lie in (0, 1)")
        if m == "sd_goldstein":
            need(0.0 < self.mu2 < 0.5 < self.mu1 < 1.0, "need 0 < mu2 < 1/2 < mu1 < 1")
        if m == "royer_wright":
            need(self.eps_H > 0.0, "eps_h must be positive")
            need(
                not self.enforce_eps_h or self.eps_H <= math.sqrt(self.eps) * (1.0 + 1e-12),
                "eps_h must not exceed sqrt(eps)",
            )
            need(self.rw_eta > 0.0, "rw_eta must be positive")
            need(0.0 < self.backtrack < 1.0, "backtrack factor must lie in (0, 1)")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_mapping(cls, data: dict) -> "MethodConfig":
        """Build from string or typed values, e.g. a parsed ``key=value`` file."""
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in data.items():
            key = key.replace("-", "_")
            if key not in types:
                raise InvalidConfigError(f"unknown method parameter {key!r}")
            kwargs[key] = _coerce(key, raw)
        return cls(**kwargs)


def _coerce(key, raw):
    if not isinstance(raw, str):
        return raw
    if key == "method":
        return raw
    if key == "budget":
        return int(raw)
    if key == "enforce_eps_h":
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if key == "eps_h" and raw.strip().lower() in ("", "none"):
        return None
    return float(raw)
