"""Run configuration, JSON (de)serialization and the experiment presets."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from cournot_mfg.errors import ConfigurationError, UsageError
from cournot_mfg.fpk import BumpSpec
from cournot_mfg.grid import GridSpec, build_grid
from cournot_mfg.model import CESPrice, DiffusionProfile, LinearPrice, ModelParams
from cournot_mfg.spi import LearningSchedule, SpiConfig


@dataclass(frozen=True)
class GridConfig:
    L: float
    T: float
    N_L: int
    N_T: int


@dataclass(frozen=True)
class PriceConfig:
    variant: str  # "ces" | "linear"
    E: float
    rho: float
    eta: float | None = None
    delta: float | None = None
    pi_sub: float | None = None


@dataclass(frozen=True)
class ModelConfig:
    lam: float
    gamma: float
    kappa: float
    diffusion: str  # "constant" | "geometric"
    sigma: float
    price: PriceConfig


@dataclass(frozen=True)
class TerminalConfig:
    """u_T = 0 ('zero') or scale * (2 x/L - (x/L)^2) ('quadratic')."""

    kind: str = "zero"
    scale: float = 0.0


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-4
    max_iters: int = 2000
    exploitability_every: int = 10
    beta: int = 2
    initial_policy: str = "zero"  # "zero" | "max"


@dataclass(frozen=True)
class ExportConfig:
    fields: bool = True
    series: bool = True
    convergence: bool = True
    plots: bool = False
    field_times: tuple[int, ...] | None = None


@dataclass(frozen=True)
class RunConfig:
    name: str
    grid: GridConfig
    model: ModelConfig
    initial: BumpSpec
    terminal: TerminalConfig = field(default_factory=TerminalConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    export: ExportConfig = field(default_factory=ExportConfig)
    out_dir: str = "out"
    seed: int | None = None

    # -- construction of domain objects -------------------------------------------------

    def build_grid(self) -> GridSpec:
        g = self.grid
        return build_grid(g.L, g.T, g.N_L, g.N_T)

    def build_params(self) -> ModelParams:
        m = self.model
        p = m.price
        if p.variant == "ces":
            if p.eta is None or p.delta is None:
                raise ConfigurationError("CES price needs eta and delta")
            pm = CESPrice(p.E, p.rho, p.eta, p.delta, self.grid.T)
        elif p.variant == "linear":
            if p.pi_sub is None:
                raise ConfigurationError("linear price needs pi_sub")
            pm = LinearPrice(p.E, p.rho, p.pi_sub, self.grid.T)
        else:
            raise ConfigurationError(f"unknown price variant {p.variant!r}")
        return ModelParams(m.lam, m.gamma, m.kappa, DiffusionProfile(m.diffusion, m.sigma), pm)

    def build_spi_config(self) -> SpiConfig:
        s = self.solver
        return SpiConfig(
            epsilon=s.epsilon,
            max_iters=s.max_iters,
            exploitability_every=s.exploitability_every,
            schedule=LearningSchedule(s.beta),
        )

    def terminal_row(self, grid: GridSpec) -> np.ndarray:
        t = self.terminal
        if t.kind == "zero":
            return np.zeros(grid.N_L + 2)
        if t.kind == "quadratic":
            if t.scale < 0:
                raise ConfigurationError("terminal scale must be nonnegative")
            y = np.minimum(grid.x / grid.L, 1.0)
            return t.scale * (2.0 * y - y * y)
        raise ConfigurationError(f"unknown terminal kind {t.kind!r}")

    def with_solver(self, **changes) -> RunConfig:
        return replace(self, solver=replace(self.solver, **changes))

    def with_grid(self, N_L: int, N_T: int) -> RunConfig:
        return replace(self, grid=replace(self.grid, N_L=N_L, N_T=N_T))

    # -- serialization --------------------------------------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["export"]["field_times"] is not None:
            d["export"]["field_times"] = list(d["export"]["field_times"])
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> RunConfig:
        return _build(cls, d, "config")

    @classmethod
    def loads(cls, text: str) -> RunConfig:
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(d)


_NESTED = {
    (RunConfig, "grid"): GridConfig,
    (RunConfig, "model"): ModelConfig,
    (RunConfig, "initial"): BumpSpec,
    (RunConfig, "terminal"): TerminalConfig,
    (RunConfig, "solver"): SolverConfig,
    (RunConfig, "export"): ExportConfig,
    (ModelConfig, "price"): PriceConfig,
}


def _build(cls, d, where):
    if not isinstance(d, dict):
        raise ConfigurationError(f"{where}: expected a table, got {type(d).__name__}")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(d) - set(known))
    if unknown:
        raise ConfigurationError(f"{where}: unknown keys {unknown}")
    kwargs = {}
    for name, value in d.items():
        sub = _NESTED.get((cls, name))
        if sub is not None:
            value = _build(sub, value, f"{where}.{name}")
        elif name == "field_times" and value is not None:
            value = tuple(int(v) for v in value)
        kwargs[name] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigurationError(f"{where}: {exc}") from exc


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return RunConfig.loads(fh.read())


# -- presets ------------------------------------------------------------------------

def _test1(name, diffusion, N_L, N_T):
    return RunConfig(
        name=name,
        grid=GridConfig(L=6.0, T=15.0, N_L=N_L, N_T=N_T),
        model=ModelConfig(
            lam=0.0,
            gamma=2.0,
            kappa=5.0,
            diffusion=diffusion,
            sigma=0.1,
            price=PriceConfig(variant="ces", E=3.0, rho=0.01, eta=1.2, delta=0.2),
        ),
        initial=BumpSpec(center=3.0, rate=0.2, floor=0.7),
    )


def _oil(name, N_L, N_T):
    return RunConfig(
        name=name,
        grid=GridConfig(L=60.0, T=150.0, N_L=N_L, N_T=N_T),
        model=ModelConfig(
            lam=0.05,
            gamma=10.0,
            kappa=50.0,
            diffusion="geometric",
            sigma=0.05,
            price=PriceConfig(variant="ces", E=40.0, rho=0.02, eta=1.2, delta=0.1),
        ),
        initial=BumpSpec(center=30.0, rate=0.0008, floor=0.7),
    )


PRESETS = {
    "test1-bm": lambda: _test1("test1-bm", "constant", 300, 2000),
    "test1-gbm": lambda: _test1("test1-gbm", "geometric", 300, 2000),
    "oil": lambda: _oil("oil", 600, 1500),
    "test1-bm-ci": lambda: _test1("test1-bm-ci", "constant", 100, 400),
    "test1-gbm-ci": lambda: _test1("test1-gbm-ci", "geometric", 100, 400),
    "oil-ci": lambda: _oil("oil-ci", 120, 300),
}


def preset(name: str) -> RunConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise UsageError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None
