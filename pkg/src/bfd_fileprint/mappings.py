"""Constants and lookup tables for fileprint training and synthetic corpora."""

# CLI exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA_ERROR = 2
EXIT_NOT_CONVERGED = 3

MODEL_FORMAT_VERSION = 2

# Histogram streaming chunk (bytes)
READ_CHUNK_SIZE = 1 << 20

# Default dimensions: 256 -> N1 -> N2, classifier hidden layer
BFD_BINS = 256
DEFAULT_N1 = 60
DEFAULT_N2 = 15
DEFAULT_AANN_HIDDEN = 40
DEFAULT_CLASSIFIER_HIDDEN = 25

# Evaluation protocol: files per class used for training / testing
DEFAULT_TRAIN_PER_CLASS = 90
DEFAULT_TEST_PER_CLASS = 30

ACTIVATIONS = ("linear", "tanh", "logistic")

# Relative frequency of printable characters in English prose.
# Letters follow the usual corpus table; space and punctuation are
# scaled so the whole table sums to 1 after normalization.
TEXT_CHAR_FREQUENCIES = {
    " ": 0.1820, "e": 0.1020, "t": 0.0750, "a": 0.0650, "o": 0.0620,
    "i": 0.0570, "n": 0.0570, "s": 0.0530, "r": 0.0500, "h": 0.0490,
    "l": 0.0330, "d": 0.0330, "u": 0.0230, "c": 0.0220, "m": 0.0200,
    "f": 0.0180, "w": 0.0170, "g": 0.0160, "y": 0.0140, "p": 0.0140,
    "b": 0.0120, "v": 0.0080, "k": 0.0060, "x": 0.0015, "j": 0.0010,
    "q": 0.0008, "z": 0.0007,
    "T": 0.0030, "I": 0.0025, "A": 0.0020, "S": 0.0015, "H": 0.0010,
    ",": 0.0110, ".": 0.0100, "\n": 0.0060, "'": 0.0025, "-": 0.0020,
    '"': 0.0015, ";": 0.0005, ":": 0.0005, "?": 0.0005, "!": 0.0003,
}

# Extra byte mass layered over text to make markup
MARKUP_CHAR_FREQUENCIES = {
    "<": 0.0900, ">": 0.0900, "/": 0.0500, "=": 0.0450, '"': 0.0500,
}
MARKUP_SHARE = 0.35

# Byte values used by the low-entropy generator
LOW_ENTROPY_VALUES = (0x00, 0x01, 0x20, 0xFF)

# Sawtooth ramp peak range (inclusive)
SAWTOOTH_PEAK_RANGE = (127, 191)

SYNTH_CLASSES = (
    "uniform-random",
    "ascii-text",
    "markup",
    "low-entropy",
    "sawtooth",
    "mixed",
)

DEFAULT_SYNTH_SIZE_RANGE = (1024, 256 * 1024)
