"""Synthetic labeled corpora with class-distinct byte statistics."""

from collections.abc import Callable, Mapping

import numpy as np

from bfd_fileprint.errors import BadSpec
from bfd_fileprint.mappings import (
    DEFAULT_SYNTH_SIZE_RANGE,
    LOW_ENTROPY_VALUES,
    MARKUP_CHAR_FREQUENCIES,
    MARKUP_SHARE,
    SAWTOOTH_PEAK_RANGE,
    SYNTH_CLASSES,
    TEXT_CHAR_FREQUENCIES,
)
from bfd_fileprint.models import FileRef, LabeledCorpus

Generator = Callable[[np.random.Generator, int], bytes]


def _table(frequencies: dict[str, float]) -> tuple[np.ndarray, np.ndarray]:
    values = np.array([ord(c) for c in frequencies], dtype=np.uint8)
    probs = np.array(list(frequencies.values()), dtype=np.float64)
    return values, probs / probs.sum()


def _text_bytes(rng: np.random.Generator, size: int) -> np.ndarray:
    values, probs = _table(TEXT_CHAR_FREQUENCIES)
    return rng.choice(values, size=size, p=probs)


def uniform_random(rng: np.random.Generator, size: int) -> bytes:
    return rng.integers(0, 256, size=size, dtype=np.uint8).tobytes()


def ascii_text(rng: np.random.Generator, size: int) -> bytes:
    return _text_bytes(rng, size).tobytes()


def markup(rng: np.random.Generator, size: int) -> bytes:
    text = _text_bytes(rng, size)
    values, probs = _table(MARKUP_CHAR_FREQUENCIES)
    mask = rng.random(size) < MARKUP_SHARE
    text[mask] = rng.choice(values, size=int(mask.sum()), p=probs)
    return text.tobytes()


def low_entropy(rng: np.random.Generator, size: int) -> bytes:
    probs = rng.dirichlet(np.full(len(LOW_ENTROPY_VALUES), 4.0))
    return rng.choice(np.array(LOW_ENTROPY_VALUES, dtype=np.uint8), size=size, p=probs).tobytes()


def sawtooth(rng: np.random.Generator, size: int) -> bytes:
    """Cyclic ramp 0, 1, ..., peak, 0, 1, ... from a random phase."""
    peak = int(rng.integers(SAWTOOTH_PEAK_RANGE[0], SAWTOOTH_PEAK_RANGE[1] + 1))
    phase = int(rng.integers(0, peak + 1))
    return ((np.arange(size, dtype=np.int64) + phase) % (peak + 1)).astype(np.uint8).tobytes()


def mixed(rng: np.random.Generator, size: int) -> bytes:
    half = size // 2
    return ascii_text(rng, half) + uniform_random(rng, size - half)


BUILTIN_GENERATORS: dict[str, Generator] = {
    "uniform-random": uniform_random,
    "ascii-text": ascii_text,
    "markup": markup,
    "low-entropy": low_entropy,
    "sawtooth": sawtooth,
    "mixed": mixed,
}


def resolve_spec(spec: Mapping[str, Generator | str] | list[str] | None) -> dict[str, Generator]:
    """Map class names to generators; strings name built-in generators."""
    if spec is None:
        spec = list(SYNTH_CLASSES)
    if not isinstance(spec, Mapping):
        spec = {name: name for name in spec}
    resolved = {}
    for label, gen in spec.items():
        if not label:
            raise BadSpec("Class names must be non-empty")
        if isinstance(gen, str):
            if gen not in BUILTIN_GENERATORS:
                raise BadSpec(f"Unknown generator '{gen}' (built-in: {', '.join(SYNTH_CLASSES)})")
            gen = BUILTIN_GENERATORS[gen]
        if not callable(gen):
            raise BadSpec(f"Generator for class '{label}' is not callable")
        resolved[label] = gen
    if len(resolved) < 2:
        raise BadSpec(f"A synthetic corpus needs at least 2 classes, got {len(resolved)}")
    return resolved


def synth_corpus(
    spec: Mapping[str, Generator | str] | list[str] | None,
    files_per_class: int,
    size_range: tuple[int, int] = DEFAULT_SYNTH_SIZE_RANGE,
    seed: int = 0,
) -> LabeledCorpus:
    """Generate an in-memory corpus; file i of class c depends only on (seed, c, i)."""
    generators = resolve_spec(spec)
    lo, hi = size_range
    if files_per_class < 1:
        raise BadSpec(f"files_per_class must be >= 1, got {files_per_class}")
    if not 1 <= lo <= hi:
        raise BadSpec(f"Size range must satisfy 1 <= min <= max, got {size_range}")

    corpus = LabeledCorpus()
    for class_index, (label, gen) in enumerate(sorted(generators.items())):
        refs = []
        for i in range(files_per_class):
            rng = np.random.default_rng([seed, class_index, i])
            size = int(rng.integers(lo, hi + 1))
            data = gen(rng, size)
            if len(data) != size:
                raise BadSpec(f"Generator for '{label}' returned {len(data)} bytes, expected {size}")
            refs.append(FileRef.from_bytes(f"{label}/{label}_{i:04d}.bin", data))
        corpus.classes[label] = refs
    return corpus
