from __future__ import annotations

import logging
from typing import Optional

from dna_image_store.dna.primers import PrimerSet, design_primers
from dna_image_store.utils.codec_settings import CodecSettings


class DnaImageCodec:
    """
    High-level entry point of the DNA image store.

    Holds the codec settings and the primer set, and exposes encoding,
    channel simulation, decoding and end-to-end experiments on top of the
    pipeline modules.
    """

    def __init__(
        self,
        settings: Optional[CodecSettings] = None,
        primer_set: Optional[PrimerSet] = None,
        logger: Optional[logging.Logger] = None,
    ):
        if logger is None:
            self.logger = logging.getLogger(self.__class__.__name__)
        else:
            self.logger = logger
        self.settings = settings or CodecSettings()
        self._primer_set = primer_set

        self.logger.debug(
            f"Codec with resync rate {self.settings.resync_rate} and primer seed {self.settings.primer_seed}."
        )

    @classmethod
    def from_env(
        cls,
        logger: Optional[logging.Logger] = None,
    ) -> DnaImageCodec:
        """
        Construct a codec using environment-based settings.

        Returns:
            DnaImageCodec: A codec configured by `CodecSettings.from_env()`.
        """
        return cls(settings=CodecSettings.from_env(), logger=logger)

    from dna_image_store.operations.encode import (
        encode_images,
        encode_files,
    )
    from dna_image_store.operations.decode import (
        decode_pool,
        decode_files,
    )
    from dna_image_store.operations.simulate import (
        simulate_pool,
        simulate_files,
    )
    from dna_image_store.operations.experiment import (
        run_experiment,
    )

    @property
    def primer_set(self) -> PrimerSet:
        """
        The primer pairs, one per level, designed on first use.

        Returns:
            PrimerSet: Primers of every pool this codec writes.

        Raises:
            PrimerDesignError: If the search exhausts its attempt budget.
        """
        if self._primer_set is None:
            self._primer_set = design_primers(
                self.settings.primer_seed, self.settings.primer_attempts
            )
            self.logger.info(
                f"Designed {len(self._primer_set.pairs)} primer pairs, "
                f"minimum distance {self._primer_set.min_distance()}."
            )
        return self._primer_set
