"""pyloader: thin read-only consumer of shapecap datasets."""

from .loader import (
    FORMAT_VERSION,
    DatasetFormatError,
    DatasetReader,
    LoadedInstance,
    open_dataset,
    write_candidates,
)

__version__ = "0.1.0"
