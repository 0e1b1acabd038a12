class DnaImageStoreError(Exception):
    """
    Base exception for the DNA image store.

    Serves as the common ancestor for all custom exceptions in this
    package to allow catching them collectively when desired.
    """

    pass


class InvalidInputError(DnaImageStoreError):
    """
    Invalid input provided to a codec, channel or restoration operation.

    Args:
        message (str): Explanation of the violated precondition.
    """

    def __init__(
        self,
        message: str,
    ):
        self.message = message
        super().__init__(self.message)


class CapacityError(DnaImageStoreError):
    """
    A code or address space is too small for the requested content.

    Raised for codebook shortfalls and for images whose streams need more
    blocks than the address layout can index.

    Args:
        message (str): Description of the exceeded capacity.
    """

    def __init__(
        self,
        message: str,
    ):
        self.message = message
        super().__init__(self.message)


class AmbiguousDecodeError(DnaImageStoreError):
    """
    A received word is equidistant from two or more valid words.

    Args:
        message (str): The received word and its tied candidates.
    """

    def __init__(
        self,
        message: str,
    ):
        self.message = message
        super().__init__(self.message)


class PrimerDesignError(DnaImageStoreError):
    """
    The seeded primer search exhausted its attempt budget.

    Args:
        message (str): Details about the search parameters.
    """

    def __init__(
        self,
        message: str,
    ):
        self.message = message
        super().__init__(self.message)


class ManifestError(DnaImageStoreError):
    """
    Missing, malformed or incompatible manifest or configuration file.

    Args:
        message (str): Description of the problem.
    """

    def __init__(
        self,
        message: str,
    ):
        self.message = message
        super().__init__(self.message)


class ImageFormatError(DnaImageStoreError):
    """
    Unreadable or malformed image file.

    Args:
        message (str): Description of the format violation.
    """

    def __init__(
        self,
        message: str,
    ):
        self.message = message
        super().__init__(self.message)


class InpaintingError(DnaImageStoreError):
    """
    Inpainting cannot proceed, e.g. because every pixel is masked.

    Args:
        message (str): Description of the failure.
    """

    def __init__(
        self,
        message: str,
    ):
        self.message = message
        super().__init__(self.message)
