from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, field_validator, model_validator


class EdgeKind(str, Enum):
    periodic = "periodic"
    moving_wall = "moving_wall"
    mass_inflow = "mass_inflow"
    pressure_outflow = "pressure_outflow"


class EdgeCondition(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: EdgeKind = EdgeKind.periodic
    # wall velocity for moving_wall, inflow velocity for mass_inflow
    velocity: Optional[tuple[float, float]] = None
    # outlet density for pressure_outflow
    density: float = Field(default=1.0, gt=0.0)

    @model_validator(mode="before")
    @classmethod
    def accept_bare_kind(cls, data):
        if isinstance(data, str):
            return {"kind": data}
        return data


class BoundarySpec(BaseModel):
    """Boundary condition per lattice edge: north is y = ny-1, east is x = nx-1."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    north: EdgeCondition = EdgeCondition()
    south: EdgeCondition = EdgeCondition()
    east: EdgeCondition = EdgeCondition()
    west: EdgeCondition = EdgeCondition()

    @model_validator(mode="after")
    def check_periodic_pairs(self):
        if (self.north.kind == EdgeKind.periodic) != (self.south.kind == EdgeKind.periodic):
            raise ValueError("north and south must both be periodic or both non-periodic")
        if (self.east.kind == EdgeKind.periodic) != (self.west.kind == EdgeKind.periodic):
            raise ValueError("east and west must both be periodic or both non-periodic")
        return self

    def edges(self) -> dict[str, EdgeCondition]:
        return {"west": self.west, "east": self.east, "south": self.south, "north": self.north}

    @property
    def periodic_x(self) -> bool:
        return self.west.kind == EdgeKind.periodic

    @property
    def periodic_y(self) -> bool:
        return self.south.kind == EdgeKind.periodic

    @classmethod
    def fully_periodic(cls) -> "BoundarySpec":
        return cls()

    @classmethod
    def couette(cls, u_top: float) -> "BoundarySpec":
        return cls(
            north=EdgeCondition(kind=EdgeKind.moving_wall, velocity=(u_top, 0.0)),
            south=EdgeCondition(kind=EdgeKind.moving_wall, velocity=(0.0, 0.0)),
        )

    @classmethod
    def cavity(cls, u_lid: float) -> "BoundarySpec":
        wall = EdgeCondition(kind=EdgeKind.moving_wall, velocity=(0.0, 0.0))
        return cls(
            north=EdgeCondition(kind=EdgeKind.moving_wall, velocity=(u_lid, 0.0)),
            south=wall,
            east=wall,
            west=wall,
        )

    @classmethod
    def channel(cls, u_in: float, rho_out: float = 1.0) -> "BoundarySpec":
        wall = EdgeCondition(kind=EdgeKind.moving_wall, velocity=(0.0, 0.0))
        return cls(
            north=wall,
            south=wall,
            west=EdgeCondition(kind=EdgeKind.mass_inflow, velocity=(u_in, 0.0)),
            east=EdgeCondition(kind=EdgeKind.pressure_outflow, density=rho_out),
        )


class InitialKind(str, Enum):
    rest = "rest"
    shear_wave = "shear_wave"
    taylor_green = "taylor_green"


class InitialCondition(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: InitialKind = InitialKind.rest
    rho0: float = Field(default=1.0, gt=0.0)
    velocity: tuple[float, float] = (0.0, 0.0)
    amplitude: float = 0.05


class SimulationConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    nx: PositiveInt = 32
    ny: PositiveInt = 32
    tau: float = Field(default=1.0, gt=0.5)
    boundary: BoundarySpec = BoundarySpec()
    # default velocity for moving walls that do not set their own
    u_wall: tuple[float, float] = (0.0, 0.0)
    initial: InitialCondition = InitialCondition()
    steps: int = Field(default=1000, ge=0)
    snapshot_every: PositiveInt = 100
    output_path: Optional[Path] = None

    @field_validator("boundary", mode="before")
    @classmethod
    def default_boundary(cls, value):
        return BoundarySpec() if value is None else value
