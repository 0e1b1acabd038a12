from __future__ import annotations

from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from dna_image_store.exceptions import ManifestError


class ChannelParams(BaseModel):
    """
    Write/read channel of one simulation run.

    Args:
        drop_count (int): Oligos removed outright.
        drop_rate (float): Fraction of oligos removed; used when `drop_count` is 0.
        substitution_rate (float): Per-position substitution probability of the pool.
        coverage (Optional[float]): Mean reads per oligo. None skips read
            simulation and consensus; the damaged pool is decoded directly.
        fixed_reads (Optional[int]): Exact reads per oligo instead of Poisson draws.
        read_error (float): Per-base substitution probability of each read.
        level (Optional[int]): Keep only the oligos of one level's primer pair.
    """

    drop_count: int = Field(default=0, ge=0)
    drop_rate: float = Field(default=0.0, ge=0, le=1)
    substitution_rate: float = Field(default=0.0, ge=0, le=1)
    coverage: Optional[float] = Field(default=None, ge=1)
    fixed_reads: Optional[int] = Field(default=None, ge=1)
    read_error: float = Field(default=0.0, ge=0, le=1)
    level: Optional[int] = Field(default=None, ge=0, le=7)

    def drops_for(
        self,
        pool_size: int,
    ) -> int:
        if self.drop_count:
            return self.drop_count
        return int(round(self.drop_rate * pool_size))

    @property
    def simulates_reads(self) -> bool:
        return self.coverage is not None or self.fixed_reads is not None


class RestorationParams(BaseModel):
    t: int = Field(default=18, ge=0)
    sigma_d2: float = Field(default=45.0, gt=0)
    sigma_r2: float = Field(default=45.0, gt=0)
    window: int = Field(default=9, ge=1)
    max_median_window: int = Field(default=7, ge=3)
    inpaint_tolerance: float = Field(default=0.5, gt=0)
    inpaint_max_iterations: int = Field(default=500, ge=1)
    median_iterations: int = Field(default=1, ge=1)
    dump_stages: bool = False

    @field_validator("window", "max_median_window")
    @classmethod
    def _odd(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError(f"Window sizes must be odd, got {value}.")
        return value


class ExperimentConfig(BaseModel):
    """
    One end-to-end experiment: encode, simulate, decode, restore, evaluate.

    Every randomized stage derives its generator from `seed`.
    """

    inputs: List[Path] = Field(min_length=1)
    output_dir: Path
    seed: int = 0
    resync_rate: float = Field(default=0.03, gt=0, le=1)
    primer_seed: int = 2020
    channel: ChannelParams = ChannelParams()
    restoration: RestorationParams = RestorationParams()

    @model_validator(mode="after")
    def _check_inputs(self) -> ExperimentConfig:
        if len(self.inputs) > 16:
            raise ValueError(f"At most 16 images fit one pool, got {len(self.inputs)}.")
        return self

    @classmethod
    def from_file(
        cls,
        path: Union[str, Path],
    ) -> ExperimentConfig:
        """
        Load a JSON config; relative input and output paths resolve against the
        config file's directory.

        Raises:
            ManifestError: If the file is missing or invalid.
        """
        path = Path(path)
        try:
            config = cls.model_validate_json(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ManifestError(f"Cannot read config '{path}': {e}") from e
        except ValidationError as e:
            raise ManifestError(f"Invalid config '{path}': {e}") from e
        base = path.parent
        return config.model_copy(
            update={
                "inputs": [p if p.is_absolute() else base / p for p in config.inputs],
                "output_dir": (
                    config.output_dir
                    if config.output_dir.is_absolute()
                    else base / config.output_dir
                ),
            }
        )

    def to_file(
        self,
        path: Union[str, Path],
    ) -> None:
        Path(path).write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")
