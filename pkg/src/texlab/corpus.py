"""Procedural texture corpus with exactly known semantic attribute vectors.

Five pattern families (stripes, spots, waves, rhombi, marble) are rendered
from closed-form recipes, so every image's 94-dimensional attribute vector
(38 adjectives, 55 nouns, 1 color value) is known by construction rather
than by human annotation. Rendering is a pure function of (spec, size);
the spec's seed drives pattern phase and spot/turbulence randomness but
never the semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .dataio import write_manifest, write_ppm
from .errors import ConfigError, DomainError, EmptyInputError

ADJECTIVES = (
    "repetitive", "floral", "regular", "fresh", "vintage", "wooden",
    "blurry", "striped", "zig-zag", "wavy", "classical", "undertint",
    "simple", "modern", "lovely", "worn-out", "elegant", "serried",
    "exquisite", "patterned", "symmetrical", "country-style",
    "bright-colored", "complex", "bright", "post-modern", "colorful",
    "messy", "somber", "granular", "cracked", "coarse", "spotted",
    "marble", "stone", "bent", "netted", "geometric",
)

NOUNS = (
    "triangle", "leafage", "rhombus", "square", "animal", "circle",
    "plant", "bird", "butterfly", "dragonfly", "tree", "branch",
    "letter", "star", "brick", "plume", "figure", "polygon", "book",
    "bookshelf", "grape", "pinecone", "pineapple", "cherry",
    "fish-and-grass", "photo-frame", "automobile", "bicycle", "balloon",
    "building", "cloud", "airplane", "mountain", "arrow", "mushroom",
    "musical-note", "boat", "horologe", "dandelion", "crown", "button",
    "robot", "sky", "vine", "bowknot", "seawater", "water-drop", "soil",
    "skirt", "snow", "cotton", "tyre", "shoes", "glasses", "windmill",
)

ADJECTIVE_COUNT = len(ADJECTIVES)
NOUN_COUNT = len(NOUNS)
SEMANTIC_DIM = ADJECTIVE_COUNT + NOUN_COUNT + 1
COLOR_INDEX = SEMANTIC_DIM - 1

_ADJ_INDEX = {name: i for i, name in enumerate(ADJECTIVES)}
_NOUN_INDEX = {name: ADJECTIVE_COUNT + i for i, name in enumerate(NOUNS)}

FAMILIES = ("striped", "spotted", "wavy", "rhombus", "marble")
FAMILY_ADJECTIVE = {
    "striped": "striped",
    "spotted": "spotted",
    "wavy": "wavy",
    "rhombus": "geometric",
    "marble": "marble",
}
FAMILY_NOUNS = {"spotted": ("circle",), "rhombus": ("rhombus",)}

VALID_SIZES = (16, 32, 64)

# Mean luminance shifts by BRIGHTNESS_LUMA_SCALE * brightness.
BRIGHTNESS_LUMA_SCALE = 0.5
# Largest per-channel chroma offset at colorfulness 1.
CHROMA_BUDGET = 0.3
# Keeps channel values strictly inside (-1, 1) so no clipping is needed.
RANGE_MARGIN = 0.005

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def adjective_index(name: str) -> int:
    return _ADJ_INDEX[name]


def noun_index(name: str) -> int:
    return _NOUN_INDEX[name]


def _chroma_axes():
    # Orthonormal pair perpendicular to the luma direction, rescaled so any
    # hue phase keeps per-channel magnitude <= 1.
    w = LUMA_WEIGHTS / np.linalg.norm(LUMA_WEIGHTS)
    e1 = np.array([1.0, 0.0, 0.0]) - np.dot([1.0, 0.0, 0.0], w) * w
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(w, e1)
    peak = np.sqrt(e1 * e1 + e2 * e2).max()
    return e1 / peak, e2 / peak


_CHROMA_E1, _CHROMA_E2 = _chroma_axes()


@dataclass(frozen=True)
class TextureSpec:
    """Recipe for one texture; semantics depend on every field except seed."""

    family: str
    frequency: float = 0.125        # cycles per pixel
    orientation: float = 0.0        # radians
    spot_density: float = 0.015     # spots per pixel^2
    wave_amplitude: float = 2.0     # pixels of stripe displacement
    turbulence_octaves: int = 3
    brightness: float = 0.0         # [-1, 1], signed
    colorfulness: float = 0.0       # [0, 1]
    repetitiveness: float = 1.0     # [0, 1]
    hue: float = 0.0                # [0, 1)
    seed: int = 0

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        checks = (
            (0.0 < self.frequency <= 0.5, "frequency in (0, 0.5]"),
            (np.isfinite(self.orientation), "finite orientation"),
            (0.0 < self.spot_density <= 0.1, "spot_density in (0, 0.1]"),
            (0.0 <= self.wave_amplitude <= 10.0, "wave_amplitude in [0, 10]"),
            (1 <= self.turbulence_octaves <= 6, "turbulence_octaves in [1, 6]"),
            (-1.0 <= self.brightness <= 1.0, "brightness in [-1, 1]"),
            (0.0 <= self.colorfulness <= 1.0, "colorfulness in [0, 1]"),
            (0.0 <= self.repetitiveness <= 1.0, "repetitiveness in [0, 1]"),
            (0.0 <= self.hue < 1.0, "hue in [0, 1)"),
        )
        for ok, what in checks:
            if not ok:
                raise ConfigError(f"spec violates {what}: {self}")


def _smoothstep(t):
    return t * t * (3.0 - 2.0 * t)


def _value_noise(size: int, cell: float, rng) -> np.ndarray:
    """Bilinear value noise in [0, 1] on a random lattice."""
    grid_n = int(np.ceil(size / cell)) + 2
    lattice = rng.random((grid_n, grid_n))
    coords = np.arange(size) / cell
    idx = coords.astype(int)
    frac = _smoothstep(coords - idx)
    yi, xi = np.meshgrid(idx, idx, indexing="ij")
    fy, fx = np.meshgrid(frac, frac, indexing="ij")
    v00 = lattice[yi, xi]
    v01 = lattice[yi, xi + 1]
    v10 = lattice[yi + 1, xi]
    v11 = lattice[yi + 1, xi + 1]
    top = v00 + fx * (v01 - v00)
    bot = v10 + fx * (v11 - v10)
    return top + fy * (bot - top)


def _fbm(size: int, octaves: int, rng) -> np.ndarray:
    """Layered value noise normalized to [0, 1]."""
    total = np.zeros((size, size))
    amp_sum = 0.0
    for o in range(octaves):
        cell = max(2.0, size / (2.0 ** (o + 1)))
        amp = 0.5**o
        total += amp * _value_noise(size, cell, rng)
        amp_sum += amp
    return total / amp_sum


def _rotated_coords(size: int, orientation: float):
    half = (size - 1) / 2.0
    axis = np.arange(size, dtype=np.float64) - half
    y, x = np.meshgrid(axis, axis, indexing="ij")
    u = x * np.cos(orientation) + y * np.sin(orientation)
    v = -x * np.sin(orientation) + y * np.cos(orientation)
    return u, v


def _base_pattern(spec: TextureSpec, size: int, rng) -> np.ndarray:
    u, v = _rotated_coords(size, spec.orientation)
    two_pi_f = 2.0 * np.pi * spec.frequency
    if spec.family == "striped":
        phase = rng.uniform(0.0, 2.0 * np.pi)
        return np.sin(two_pi_f * u + phase)
    if spec.family == "wavy":
        phase = rng.uniform(0.0, 2.0 * np.pi)
        wobble = rng.uniform(0.0, 2.0 * np.pi)
        shift = spec.wave_amplitude * np.sin(two_pi_f * v + wobble)
        return np.sin(two_pi_f * (u + shift) + phase)
    if spec.family == "rhombus":
        p1 = rng.uniform(0.0, 2.0 * np.pi)
        p2 = rng.uniform(0.0, 2.0 * np.pi)
        return np.sign(np.sin(two_pi_f * u + p1) * np.sin(two_pi_f * v + p2))
    if spec.family == "spotted":
        count = max(1, int(round(spec.spot_density * size * size)))
        centers = rng.uniform(0.0, size, (count, 2))
        radius = max(1.3, 0.05 * size)
        axis = np.arange(size, dtype=np.float64)
        yy, xx = np.meshgrid(axis, axis, indexing="ij")
        field = np.zeros((size, size))
        for cy, cx in centers:
            field += np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2.0 * radius * radius))
        return 2.0 * np.clip(field, 0.0, 1.0) - 1.0
    # marble: stripes phase-warped by turbulence
    phase = rng.uniform(0.0, 2.0 * np.pi)
    turbulence = _fbm(size, spec.turbulence_octaves, rng)
    return np.sin(two_pi_f * u + 5.0 * turbulence + phase)


def render_texture(spec: TextureSpec, size: int) -> np.ndarray:
    """Render an HxWx3 image with channel values strictly inside (-1, 1).

    Deterministic in (spec, size). Brightness shifts the mean luminance by
    exactly BRIGHTNESS_LUMA_SCALE * brightness; colorfulness scales a
    luma-neutral chroma field at the spec's hue.
    """
    if size not in VALID_SIZES:
        raise ConfigError(f"size must be one of {VALID_SIZES}, got {size}")
    spec.validate()
    rng = np.random.default_rng(np.uint64(spec.seed))
    pattern = _base_pattern(spec, size, rng)
    if spec.repetitiveness < 1.0:
        blend = 0.35 * (1.0 - spec.repetitiveness)
        noise = 2.0 * _fbm(size, 3, rng) - 1.0
        pattern = (1.0 - blend) * pattern + blend * noise
    chroma_amp = CHROMA_BUDGET * spec.colorfulness
    luma_amp = 1.0 - RANGE_MARGIN - chroma_amp - BRIGHTNESS_LUMA_SCALE * abs(spec.brightness)
    luma = luma_amp * pattern + BRIGHTNESS_LUMA_SCALE * spec.brightness
    hue_angle = 2.0 * np.pi * spec.hue
    tint = np.cos(hue_angle) * _CHROMA_E1 + np.sin(hue_angle) * _CHROMA_E2
    weight = chroma_amp * 0.5 * (pattern + 1.0)
    return luma[..., None] + weight[..., None] * tint[None, None, :]


def ground_truth_semantics(spec: TextureSpec) -> np.ndarray:
    """The 94-dim attribute vector implied by a spec; ignores the seed."""
    spec.validate()
    sem = np.zeros(SEMANTIC_DIM)
    sem[adjective_index(FAMILY_ADJECTIVE[spec.family])] = 1.0
    sem[adjective_index("repetitive")] = spec.repetitiveness
    sem[adjective_index("bright")] = spec.brightness
    sem[adjective_index("colorful")] = spec.colorfulness
    for noun in FAMILY_NOUNS.get(spec.family, ()):
        sem[noun_index(noun)] = 1.0
    sem[COLOR_INDEX] = spec.hue
    return sem


def validate_semantics(vector) -> np.ndarray:
    """Check the attribute-vector invariants and return a float64 copy."""
    sem = np.asarray(vector, dtype=np.float64)
    if sem.shape != (SEMANTIC_DIM,):
        raise DomainError(f"semantic vector must have shape ({SEMANTIC_DIM},), got {sem.shape}")
    adj = sem[:ADJECTIVE_COUNT]
    nouns = sem[ADJECTIVE_COUNT:COLOR_INDEX]
    if not np.all(np.isfinite(sem)):
        raise DomainError("semantic entries must be finite")
    if np.any(adj < -1.0) or np.any(adj > 1.0):
        raise DomainError("adjective entries must lie in [-1, 1]")
    if not np.all((nouns == 0.0) | (nouns == 1.0)):
        raise DomainError("noun entries must be exactly 0 or 1")
    if not 0.0 <= sem[COLOR_INDEX] <= 1.0:
        raise DomainError("color value must lie in [0, 1]")
    return sem


def sample_spec(family: str, rng, signed_brightness: bool = True) -> TextureSpec:
    """Draw one plausible spec for a family from a seeded generator."""
    low = -0.6 if signed_brightness else 0.0
    return TextureSpec(
        family=family,
        frequency=float(rng.uniform(1.0 / 16.0, 1.0 / 4.0)),
        orientation=float(rng.uniform(0.0, np.pi)),
        spot_density=float(rng.uniform(0.008, 0.03)),
        wave_amplitude=float(rng.uniform(1.0, 5.0)),
        turbulence_octaves=int(rng.integers(2, 5)),
        brightness=float(rng.uniform(low, 0.6)),
        colorfulness=float(rng.uniform(0.0, 1.0)),
        repetitiveness=float(rng.uniform(0.5, 1.0)),
        hue=float(rng.uniform(0.0, 1.0)),
        seed=int(rng.integers(0, 2**63 - 1)),
    )


def generate_corpus(n: int, master_seed: int, size: int, out_dir,
                    signed_brightness: bool = True) -> Path:
    """Write n (image, semantics) pairs; family counts balanced within 1.

    Returns the manifest path. The same (n, master_seed, size) always
    produces byte-identical files.
    """
    if n < 1:
        raise EmptyInputError("corpus size must be at least 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(master_seed)
    names, semantics = [], []
    for i in range(n):
        spec = sample_spec(FAMILIES[i % len(FAMILIES)], rng, signed_brightness)
        name = f"tex_{i:05d}.ppm"
        write_ppm(out / name, render_texture(spec, size))
        names.append(name)
        semantics.append(ground_truth_semantics(spec))
    manifest = out / "manifest.tsv"
    write_manifest(manifest, names, np.asarray(semantics))
    return manifest


def spec_with(spec: TextureSpec, **changes) -> TextureSpec:
    """Convenience wrapper around dataclasses.replace with validation."""
    new = replace(spec, **changes)
    new.validate()
    return new
