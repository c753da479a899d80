"""SFT dataset construction: action-masked serialization and 1:1 mixing."""

from .builder import SftExample, build_chat_example, build_sft_example, validate_example
from .io import export_dataset, load_dataset, load_general_chat
from .mixing import MixedDataset, mix

__all__ = [
    "MixedDataset",
    "build_chat_example",
    "SftExample",
    "build_sft_example",
    "export_dataset",
    "load_dataset",
    "load_general_chat",
    "mix",
    "validate_example",
]
