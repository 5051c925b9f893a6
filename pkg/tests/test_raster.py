import math
import random

import numpy as np
import pytest

from phishforge.raster import (
    RasterImage,
    RasterError,
    TransformSpec,
    gaussian_kernel,
    rasterize_svg,
    transform_image,
)

RNG = lambda seed=7: random.Random(seed)


def random_image(seed: int, w: int = 24, h: int = 16) -> RasterImage:
    gen = np.random.default_rng(seed)
    return RasterImage.from_array(gen.integers(0, 256, (h, w, 4), dtype=np.uint8))


# -- basic type invariants ----------------------------------------------------


def test_pixel_buffer_shape_enforced():
    with pytest.raises(RasterError):
        RasterImage(3, 3, np.zeros((3, 4, 4), dtype=np.uint8))
    with pytest.raises(RasterError):
        RasterImage(0, 3, np.zeros((3, 0, 4), dtype=np.uint8))


def test_png_roundtrip():
    img = random_image(1)
    again = RasterImage.from_png(img.to_png())
    assert np.array_equal(img.pixels, again.pixels)


def test_undecodable_bytes_raise():
    with pytest.raises(RasterError):
        RasterImage.from_png(b"not an image")


def test_spec_validation():
    with pytest.raises(RasterError):
        TransformSpec.opacity(1.5)
    with pytest.raises(RasterError):
        TransformSpec.rotate(10, "sideways")
    with pytest.raises(RasterError):
        TransformSpec.gaussian_blur(0)
    with pytest.raises(RasterError):
        TransformSpec.gaussian_blur(2.0, kernel_radius=2)  # < ceil(3*sigma)
    with pytest.raises(RasterError):
        TransformSpec.grey_mesh(mesh_alpha=0.0)
    with pytest.raises(RasterError):
        TransformSpec.noise("salt", 1.0)
    with pytest.raises(RasterError):
        TransformSpec.watermark("")


# -- opacity ---------------------------------------------------------------


def test_opacity_multiplies_alpha_exactly():
    img = RasterImage.filled(4, 4, (10, 20, 30, 255))
    out = transform_image(img, TransformSpec.opacity(0.2), RNG())
    assert int(out.pixels[0, 0, 3]) == 51  # 255 * 0.2
    assert np.array_equal(out.pixels[:, :, :3], img.pixels[:, :, :3])


def test_opacity_multiplies_partial_alpha():
    img = RasterImage.filled(2, 2, (0, 0, 0, 100))
    out = transform_image(img, TransformSpec.opacity(0.5), RNG())
    assert int(out.pixels[0, 0, 3]) == 50


# -- gaussian blur ------------------------------------------------------------


def test_kernel_normalized():
    for sigma in (0.5, 1.0, 2.5, 7.0):
        radius = math.ceil(3 * sigma)
        assert abs(gaussian_kernel(sigma, radius).sum() - 1.0) < 1e-9


def test_blur_sigma_to_zero_is_identity():
    img = random_image(2)
    out = transform_image(img, TransformSpec.gaussian_blur(1e-9), RNG())
    assert np.abs(out.pixels.astype(int) - img.pixels.astype(int)).max() <= 1


def test_blur_of_constant_image_is_constant():
    img = RasterImage.filled(20, 10, (77, 150, 9, 200))
    out = transform_image(img, TransformSpec.gaussian_blur(2.5), RNG())
    assert np.abs(out.pixels.astype(int) - img.pixels.astype(int)).max() <= 1


def naive_blur(pixels: np.ndarray, sigma: float, radius: int) -> np.ndarray:
    """Independent oracle: dense 2D convolution with edge clamping."""
    kernel_1d = np.exp(-(np.arange(-radius, radius + 1) ** 2) / (2 * sigma * sigma))
    kernel_1d /= kernel_1d.sum()
    kernel = np.outer(kernel_1d, kernel_1d)
    h, w, _ = pixels.shape
    out = np.zeros_like(pixels, dtype=np.float64)
    src = pixels.astype(np.float64)
    for y in range(h):
        for x in range(w):
            acc = np.zeros(4)
            for dy in range(-radius, radius + 1):
                for dx in range(-radius, radius + 1):
                    yy = min(max(y + dy, 0), h - 1)
                    xx = min(max(x + dx, 0), w - 1)
                    acc += kernel[dy + radius, dx + radius] * src[yy, xx]
            out[y, x] = acc
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def test_blur_matches_naive_convolution_oracle():
    img = random_image(3, w=9, h=7)
    sigma = 1.2
    out = transform_image(img, TransformSpec.gaussian_blur(sigma), RNG())
    expected = naive_blur(img.pixels, sigma, math.ceil(3 * sigma))
    assert np.abs(out.pixels.astype(int) - expected.astype(int)).max() <= 1


def test_blur_preserves_dimensions():
    img = random_image(4)
    out = transform_image(img, TransformSpec.gaussian_blur(2.0), RNG())
    assert (out.width, out.height) == (img.width, img.height)


# -- rotation ----------------------------------------------------------------


def test_rotate_90_swaps_dimensions():
    img = RasterImage.filled(100, 40, (1, 2, 3, 255))
    out = transform_image(img, TransformSpec.rotate(90, "cw"), RNG())
    assert (out.width, out.height) == (40, 100)


def test_rotate_360_is_identity():
    img = random_image(5)
    out = transform_image(img, TransformSpec.rotate(360, "cw"), RNG())
    assert np.array_equal(out.pixels, img.pixels)


def test_rotate_90_cw_moves_topleft_to_topright():
    arr = np.zeros((2, 4, 4), dtype=np.uint8)
    arr[:, :, 3] = 255
    arr[0, 0] = [255, 0, 0, 255]
    out = transform_image(RasterImage.from_array(arr), TransformSpec.rotate(90, "cw"), RNG())
    assert out.pixels[0, -1, 0] == 255


def test_rotate_90_ccw_moves_topleft_to_bottomleft():
    arr = np.zeros((2, 4, 4), dtype=np.uint8)
    arr[:, :, 3] = 255
    arr[0, 0] = [255, 0, 0, 255]
    out = transform_image(RasterImage.from_array(arr), TransformSpec.rotate(90, "ccw"), RNG())
    assert out.pixels[-1, 0, 0] == 255


def test_rotate_expands_canvas_to_bounding_box():
    img = RasterImage.filled(100, 40, (9, 9, 9, 255))
    theta = 30.0
    out = transform_image(img, TransformSpec.rotate(theta, "ccw"), RNG())
    rad = math.radians(theta)
    expected_w = math.ceil(100 * abs(math.cos(rad)) + 40 * abs(math.sin(rad)))
    expected_h = math.ceil(100 * abs(math.sin(rad)) + 40 * abs(math.cos(rad)))
    assert (out.width, out.height) == (expected_w, expected_h)
    # corners of the expanded canvas are transparent background
    assert out.pixels[0, 0, 3] == 0
    assert out.pixels[-1, -1, 3] == 0


# -- grey mesh ----------------------------------------------------------------


def test_mesh_blends_grid_lines():
    img = RasterImage.filled(16, 16, (0, 0, 0, 255))
    out = transform_image(img, TransformSpec.grey_mesh(8, 1, 0.5), RNG())
    assert out.pixels[0, 0, 0] == 64  # 0.5 * 128
    assert out.pixels[4, 4, 0] == 0  # off-grid untouched
    changed = (out.pixels != img.pixels).any(axis=2)
    assert changed.any()
    # grid rows/cols at multiples of spacing
    assert changed[8, :].all()
    assert changed[:, 8].all()


def test_mesh_never_out_of_range():
    img = random_image(6)
    out = transform_image(img, TransformSpec.grey_mesh(4, 2, 1.0), RNG())
    assert out.pixels.min() >= 0 and out.pixels.max() <= 255


# -- noise --------------------------------------------------------------------


def test_noise_mean_preserved_on_grey_image():
    img = RasterImage.filled(100, 100, (128, 128, 128, 255))
    out = transform_image(img, TransformSpec.noise("gaussian", 10.0), RNG(3))
    for channel in range(3):
        assert abs(float(out.pixels[:, :, channel].mean()) - 128.0) <= 1.5
    assert np.array_equal(out.pixels[:, :, 3], img.pixels[:, :, 3])


def test_noise_changes_pixels_and_stays_in_range():
    img = RasterImage.filled(20, 20, (250, 5, 128, 255))
    out = transform_image(img, TransformSpec.noise("uniform", 30.0), RNG(4))
    assert (out.pixels != img.pixels).any()
    assert out.pixels.min() >= 0 and out.pixels.max() <= 255


def test_noise_deterministic_under_seed():
    img = random_image(8)
    a = transform_image(img, TransformSpec.noise("gaussian", 10.0), RNG(11))
    b = transform_image(img, TransformSpec.noise("gaussian", 10.0), RNG(11))
    assert np.array_equal(a.pixels, b.pixels)


# -- watermark ----------------------------------------------------------------


@pytest.mark.parametrize("placement", ["bottom_right", "diagonal"])
def test_watermark_changes_pixels_in_range(placement):
    img = RasterImage.filled(120, 60, (255, 255, 255, 255))
    out = transform_image(img, TransformSpec.watermark("spoofed.co", placement, 0.4), RNG())
    assert (out.pixels != img.pixels).any()
    assert out.pixels.min() >= 0 and out.pixels.max() <= 255
    assert (out.width, out.height) == (img.width, img.height)


# -- shared invariants ----------------------------------------------------------


@pytest.mark.parametrize(
    "spec",
    [
        TransformSpec.opacity(0.3),
        TransformSpec.watermark("mark", "bottom_right", 0.4),
        TransformSpec.gaussian_blur(1.5),
        TransformSpec.grey_mesh(),
        TransformSpec.noise("gaussian", 8.0),
    ],
)
def test_non_rotate_transforms_preserve_dimensions(spec):
    img = random_image(9, w=33, h=21)
    out = transform_image(img, spec, RNG(5))
    assert (out.width, out.height) == (img.width, img.height)
    assert out.pixels.dtype == np.uint8
    assert out.pixels.shape[2] == 4


def test_transforms_never_mutate_input():
    img = random_image(10)
    snapshot = img.pixels.copy()
    for spec in (
        TransformSpec.opacity(0.5),
        TransformSpec.rotate(17, "cw"),
        TransformSpec.gaussian_blur(1.0),
        TransformSpec.grey_mesh(),
        TransformSpec.noise("uniform", 5.0),
        TransformSpec.watermark("t", "diagonal", 0.5),
    ):
        transform_image(img, spec, RNG(1))
    assert np.array_equal(img.pixels, snapshot)


# -- svg ------------------------------------------------------------------------


def test_svg_rasterizes_at_4x_nominal_size():
    svg = '<svg width="50" height="20"><rect width="50" height="20" fill="#123456"/></svg>'
    out = rasterize_svg(svg, scale=4.0)
    assert (out.width, out.height) == (200, 80)
    assert (out.pixels[:, :, 3] > 0).all()


def test_svg_viewbox_fallback_and_shapes():
    svg = (
        '<svg viewBox="0 0 10 10">'
        '<circle cx="5" cy="5" r="4" fill="red"/>'
        '<line x1="0" y1="0" x2="10" y2="10" stroke="#00ff00"/>'
        "</svg>"
    )
    out = rasterize_svg(svg, scale=2.0)
    assert (out.width, out.height) == (20, 20)
    assert (out.pixels[:, :, 0] == 255).any()  # red fill present
