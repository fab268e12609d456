from data.array_io import load_array, read_sidecar, save_array, write_sidecar
from data.normalize import normalize_sequence
from data.phantom import make_phantom_sequence
from data.preview import export_pgm
from data.sequence import ImageSequence, sequence_windows

__all__ = [
    "ImageSequence",
    "export_pgm",
    "load_array",
    "make_phantom_sequence",
    "normalize_sequence",
    "read_sidecar",
    "save_array",
    "sequence_windows",
    "write_sidecar",
]
