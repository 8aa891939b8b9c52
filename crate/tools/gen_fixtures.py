#!/usr/bin/env python3
"""Generate the synthetic clip containers and brute-force expected outputs
used by the Rust test suite.

Everything below is computed with direct per-pixel Python loops so it stays
independent of the Rust implementation it checks. Rerunning the script is
byte-stable: clip content comes from a splitmix64 stream, and all floats are
serialized with Python's shortest-roundtrip repr.

Usage: python3 tools/gen_fixtures.py
Writes under crates/star-core/tests/fixtures/.
"""

import json
import math
import os
import struct

ROOT = os.path.join(os.path.dirname(__file__), "..", "crates", "star-core", "tests", "fixtures")

MASK64 = (1 << 64) - 1


def splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


class ByteStream:
    """Deterministic u8 stream derived from splitmix64."""

    def __init__(self, seed):
        self.state = seed

    def next_byte(self):
        self.state, z = splitmix64(self.state)
        return (z >> 56) & 0xFF


def noise_clip(seed, width, height, n_frames):
    """Pure noise clip: frames[k][i][j] = (r, g, b) bytes."""
    stream = ByteStream(seed)
    frames = []
    for _ in range(n_frames):
        frame = [[(stream.next_byte(), stream.next_byte(), stream.next_byte())
                  for _ in range(width)] for _ in range(height)]
        frames.append(frame)
    return frames


def moving_blob_clip(seed, width, height, n_frames):
    """A bright blob sweeping left to right over low-amplitude noise.

    Deliberately non-palindromic and chromatic: the blob hue drifts over
    time so every metric sees signal.
    """
    stream = ByteStream(seed)
    frames = []
    for k in range(n_frames):
        cx = (k + 0.5) * width / n_frames
        cy = height / 2.0 + 2.0 * math.sin(2.0 * math.pi * k / n_frames)
        frame = []
        for i in range(height):
            row = []
            for j in range(width):
                d2 = (j - cx) ** 2 + (i - cy) ** 2
                glow = 200.0 * math.exp(-d2 / 18.0)
                r = glow * (0.5 + 0.5 * k / n_frames)
                g = glow * 0.8
                b = glow * (1.0 - 0.5 * k / n_frames)
                row.append((
                    min(255, int(r) + stream.next_byte() % 16),
                    min(255, int(g) + stream.next_byte() % 16),
                    min(255, int(b) + stream.next_byte() % 16),
                ))
            row = [tuple(row[j]) for j in range(width)]
            frame.append(row)
        frames.append(frame)
    return frames


def write_container(path, frames):
    """Raw planar container: magic, one-line JSON header, then per-frame
    R/G/B planes as unsigned bytes."""
    height = len(frames[0])
    width = len(frames[0][0])
    header = {"width": width, "height": height, "frames": len(frames)}
    with open(path, "wb") as fh:
        fh.write(b"STRV1\n")
        fh.write(json.dumps(header, separators=(",", ":")).encode("utf-8"))
        fh.write(b"\n")
        for frame in frames:
            for ch in range(3):
                plane = bytes(frame[i][j][ch] for i in range(height) for j in range(width))
                fh.write(plane)


# ---------------------------------------------------------------------------
# Brute-force reference math (per-pixel loops, f64 throughout)
# ---------------------------------------------------------------------------

LUMA = (0.299, 0.587, 0.114)
ZERO_NORM_EPS = 1e-12


def luminance(px):
    return LUMA[0] * px[0] + LUMA[1] * px[1] + LUMA[2] * px[2]


def norm(px):
    return math.sqrt(px[0] * px[0] + px[1] * px[1] + px[2] * px[2])


def metric_abs_gray(a, b):
    return abs(luminance(a) - luminance(b))


def metric_euclidean(a, b):
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2)


def metric_cosine_scaled(a, b):
    na = norm(a)
    nb = norm(b)
    if na < ZERO_NORM_EPS or nb < ZERO_NORM_EPS:
        lam = 0.0
    else:
        cos = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (na * nb)
        cos = max(-1.0, min(1.0, cos))
        lam = 1.0 - cos
    return (1.0 - lam / 2.0) * abs(na - nb)


METRICS = {
    "abs_gray": metric_abs_gray,
    "euclidean": metric_euclidean,
    "cosine_scaled": metric_cosine_scaled,
}


def accumulate(frames, metric, weighted_shadow):
    """Sum metric over consecutive frame pairs; frame indices are 1-based,
    the k-th term weighted by k/N when weighted_shadow is set."""
    n = len(frames)
    height = len(frames[0])
    width = len(frames[0][0])
    fn = METRICS[metric]
    out = [[0.0] * width for _ in range(height)]
    for k in range(2, n + 1):
        w = k / n if weighted_shadow else 1.0
        prev, cur = frames[k - 2], frames[k - 1]
        for i in range(height):
            for j in range(width):
                out[i][j] += fn(prev[i][j], cur[i][j]) * w
    return out


def split_segments(n):
    third = n // 3
    return [(1, third), (third + 1, n - third), (n - third + 1, n)]


def star_rgb(frames, metric="cosine_scaled"):
    n = len(frames)
    bounds = split_segments(n)
    channels = []
    for start, end in bounds:
        channels.append(accumulate(frames[start - 1:end], metric, False))
    return channels, bounds


SOBEL_X = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]]
SOBEL_Y = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]]


def sobel(mat, kernel):
    """3x3 correlation with replicated (edge-clamped) borders."""
    height = len(mat)
    width = len(mat[0])
    out = [[0.0] * width for _ in range(height)]
    for i in range(height):
        for j in range(width):
            acc = 0.0
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    si = min(max(i + di, 0), height - 1)
                    sj = min(max(j + dj, 0), width - 1)
                    acc += kernel[di + 1][dj + 1] * mat[si][sj]
            out[i][j] = acc
    return out


def round_half_up(x):
    return math.floor(x + 0.5)


def check_quant_margin(x):
    frac = x - math.floor(x)
    if abs(frac - 0.5) < 1e-6 and x != 0.0:
        raise SystemExit(f"quantization boundary too close: {x!r}; pick another seed")


def quantize(mat, denom):
    if denom <= 0.0:
        return [[0] * len(mat[0]) for _ in mat]
    out = []
    for row in mat:
        qrow = []
        for v in row:
            scaled = v / denom * 255.0
            check_quant_margin(scaled)
            qrow.append(int(round_half_up(scaled)))
        out.append(qrow)
    return out


def flat(mat):
    return [v for row in mat for v in row]


def matrix_max(mat):
    return max(v for row in mat for v in row)


# ---------------------------------------------------------------------------
# Bilinear resize reference (pixel centers at (i + 0.5) / n)
# ---------------------------------------------------------------------------

def resize_bilinear(frame, out_w, out_h):
    in_h = len(frame)
    in_w = len(frame[0])
    out = []
    for oi in range(out_h):
        y = (oi + 0.5) * in_h / out_h - 0.5
        y0 = math.floor(y)
        fy = y - y0
        y0c = min(max(y0, 0), in_h - 1)
        y1c = min(max(y0 + 1, 0), in_h - 1)
        row = []
        for oj in range(out_w):
            x = (oj + 0.5) * in_w / out_w - 0.5
            x0 = math.floor(x)
            fx = x - x0
            x0c = min(max(x0, 0), in_w - 1)
            x1c = min(max(x0 + 1, 0), in_w - 1)
            px = []
            for ch in range(3):
                top = frame[y0c][x0c][ch] * (1.0 - fx) + frame[y0c][x1c][ch] * fx
                bot = frame[y1c][x0c][ch] * (1.0 - fx) + frame[y1c][x1c][ch] * fx
                px.append(top * (1.0 - fy) + bot * fy)
            row.append(px)
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# Scorer / fusion reference
# ---------------------------------------------------------------------------

def standardize(v):
    d = len(v)
    mean = sum(v) / d
    var = sum((x - mean) ** 2 for x in v) / d
    denom = math.sqrt(var + 1e-5)
    return [(x - mean) / denom for x in v]


def score(v, params):
    d = params["d"]
    hidden = params["hidden"]
    w1, b1, w2, b2 = params["w1"], params["b1"], params["w2"], params["b2"]
    out = b2
    for j in range(hidden):
        acc = b1[j]
        for i in range(d):
            acc += v[i] * w1[i * hidden + j]
        if acc > 0.0:
            out += w2[j] * acc
    return out


def fuse(maps, params):
    scores = [score(standardize(m), params) for m in maps]
    mx = max(scores)
    exps = [math.exp(s - mx) for s in scores]
    total = sum(exps)
    weights = [e / total for e in exps]
    d = len(maps[0])
    fused = [sum(weights[k] * maps[k][i] for k in range(len(maps))) for i in range(d)]
    return weights, fused


def uniform_stream(seed, lo, hi):
    stream = [seed]

    def draw():
        stream[0], z = splitmix64(stream[0])
        u = z / 2.0 ** 64
        return lo + (hi - lo) * u

    return draw


# ---------------------------------------------------------------------------
# Fixture assembly
# ---------------------------------------------------------------------------

CLIPS = [
    ("c1_2x2_n6", 2, 2, 6, "noise", 0x5441_0001),
    ("c2_4x4_n8", 4, 4, 8, "noise", 0x5441_0002),
    ("c3_8x8_n12", 8, 8, 12, "noise", 0x5441_0003),
    ("c4_16x16_n25", 16, 16, 25, "noise", 0x5441_0004),
    ("c5_32x32_n40", 32, 32, 40, "blob", 0x5441_0005),
]


def build_clip_fixture(name, width, height, n, kind, seed):
    frames = noise_clip(seed, width, height, n) if kind == "noise" else \
        moving_blob_clip(seed, width, height, n)
    write_container(os.path.join(ROOT, "clips", name + ".strv"), frames)

    legacy_shadow = accumulate(frames, "abs_gray", True)
    abs_noshadow = accumulate(frames, "abs_gray", False)
    euclid = accumulate(frames, "euclidean", False)
    cosine = accumulate(frames, "cosine_scaled", False)
    channels, bounds = star_rgb(frames)
    m_x = sobel(legacy_shadow, SOBEL_X)
    m_y = sobel(legacy_shadow, SOBEL_Y)

    global_max = max(matrix_max(ch) for ch in channels)
    quant_global = [quantize(ch, global_max) for ch in channels]
    quant_per_channel = [quantize(ch, matrix_max(ch)) for ch in channels]

    expected = {
        "clip": name + ".strv",
        "width": width,
        "height": height,
        "n_frames": n,
        "probe": {
            "frame1_pixel00": list(frames[0][0][0]),
            "last_frame_last_pixel": list(frames[n - 1][height - 1][width - 1]),
        },
        "legacy_shadow": flat(legacy_shadow),
        "abs_gray_noshadow": flat(abs_noshadow),
        "euclidean": flat(euclid),
        "cosine_scaled": flat(cosine),
        "sobel_x_of_legacy": flat(m_x),
        "sobel_y_of_legacy": flat(m_y),
        "segment_bounds": bounds,
        "star_rgb": {
            "r": flat(channels[0]),
            "g": flat(channels[1]),
            "b": flat(channels[2]),
        },
        "star_rgb_quant_global": [flat(q) for q in quant_global],
        "star_rgb_quant_per_channel": [flat(q) for q in quant_per_channel],
    }
    out_path = os.path.join(ROOT, "expected", name + ".json")
    with open(out_path, "w") as fh:
        json.dump(expected, fh)
    print(f"  {name}: {width}x{height} n={n} global_max={global_max:.6f}")


def build_resize_fixture():
    frames = moving_blob_clip(0x5441_0010, 160, 120, 2)
    write_container(os.path.join(ROOT, "clips", "resize_160x120.strv"), frames)
    resized = resize_bilinear(frames[0], 40, 30)
    expected = {
        "clip": "resize_160x120.strv",
        "out_width": 40,
        "out_height": 30,
        # channel-planar row-major, matching the sidecar layout
        "planes": [
            [resized[i][j][ch] for i in range(30) for j in range(40)]
            for ch in range(3)
        ],
    }
    with open(os.path.join(ROOT, "expected", "resize_160x120.json"), "w") as fh:
        json.dump(expected, fh)
    print("  resize_160x120: 160x120 -> 40x30")


def build_fusion_fixture():
    d, hidden = 3, 128
    draw_w1 = uniform_stream(0x5441_0020, -1.0 / math.sqrt(d), 1.0 / math.sqrt(d))
    draw_w2 = uniform_stream(0x5441_0021, -1.0 / math.sqrt(hidden), 1.0 / math.sqrt(hidden))
    params = {
        "format_version": 1,
        "d": d,
        "hidden": hidden,
        "w1": [draw_w1() for _ in range(d * hidden)],
        "b1": [draw_w1() for _ in range(hidden)],
        "w2": [draw_w2() for _ in range(hidden)],
        "b2": draw_w2(),
    }
    with open(os.path.join(ROOT, "fusion", "params_d3.json"), "w") as fh:
        json.dump(params, fh)

    maps = [
        [0.5, -1.25, 3.0],
        [2.0, 2.0, 2.0],
        [-0.75, 0.1, 4.2],
    ]
    weights, fused = fuse(maps, params)
    scores = [score(standardize(m), params) for m in maps]
    expected = {
        "params": "params_d3.json",
        "maps": maps,
        "standardized": [standardize(m) for m in maps],
        "scores": scores,
        "weights": weights,
        "fused": fused,
    }
    with open(os.path.join(ROOT, "fusion", "expected_d3.json"), "w") as fh:
        json.dump(expected, fh)
    print(f"  fusion d=3: weights={['%.6f' % w for w in weights]}")


def main():
    for sub in ("clips", "expected", "fusion"):
        os.makedirs(os.path.join(ROOT, sub), exist_ok=True)
    print("clip fixtures:")
    for args in CLIPS:
        build_clip_fixture(*args)
    build_resize_fixture()
    build_fusion_fixture()
    print("done")


if __name__ == "__main__":
    main()
