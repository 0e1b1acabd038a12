from __future__ import annotations

from dataclasses import dataclass
import os


@dataclass(frozen=True)
class CodecSettings:
    """
    Immutable encoder/decoder settings shared by every pipeline stage.

    Encoder and decoder must agree on these values; the encoder records them in
    the pool manifest so the decoder never has to guess.

    Args:
        resync_rate (float): Fraction of differential symbols replaced by
            absolute resynchronization values. Must lie in (0, 1].
        primer_seed (int): Seed of the primer search.
        primer_attempts (int): Candidate budget of the primer search.
        probe_budget (int): Maximum number of symbols decoded speculatively per
            bit offset while realigning a stream after a missing block.
        log_level (str): Name of the logging level used by the CLI.
    """

    resync_rate: float = 0.03
    primer_seed: int = 2020
    primer_attempts: int = 200_000
    probe_budget: int = 4096
    log_level: str = "WARNING"

    def __post_init__(self):
        if not 0 < self.resync_rate <= 1:
            raise ValueError(
                f"resync_rate must lie in (0, 1], got {self.resync_rate}."
            )
        if self.probe_budget < 1:
            raise ValueError(f"probe_budget must be positive, got {self.probe_budget}.")
        if self.primer_attempts < 1:
            raise ValueError(
                f"primer_attempts must be positive, got {self.primer_attempts}."
            )

    @classmethod
    def from_env(cls) -> CodecSettings:
        """
        Build settings from environment variables.

        Every variable is optional; unset variables keep the defaults:
        `DNA_IMAGE_STORE_RESYNC_RATE`, `DNA_IMAGE_STORE_PRIMER_SEED`,
        `DNA_IMAGE_STORE_PRIMER_ATTEMPTS`, `DNA_IMAGE_STORE_PROBE_BUDGET` and
        `DNA_IMAGE_STORE_LOG_LEVEL`.

        Returns:
            CodecSettings: A settings instance populated from the environment.

        Raises:
            ValueError: If a variable cannot be parsed or is out of range.
        """
        defaults = cls()

        resync_rate = os.getenv("DNA_IMAGE_STORE_RESYNC_RATE")
        primer_seed = os.getenv("DNA_IMAGE_STORE_PRIMER_SEED")
        primer_attempts = os.getenv("DNA_IMAGE_STORE_PRIMER_ATTEMPTS")
        probe_budget = os.getenv("DNA_IMAGE_STORE_PROBE_BUDGET")
        log_level = os.getenv("DNA_IMAGE_STORE_LOG_LEVEL")

        return cls(
            resync_rate=(
                float(resync_rate) if resync_rate is not None else defaults.resync_rate
            ),
            primer_seed=(
                int(primer_seed) if primer_seed is not None else defaults.primer_seed
            ),
            primer_attempts=(
                int(primer_attempts)
                if primer_attempts is not None
                else defaults.primer_attempts
            ),
            probe_budget=(
                int(probe_budget) if probe_budget is not None else defaults.probe_budget
            ),
            log_level=(
                log_level.upper() if log_level is not None else defaults.log_level
            ),
        )
