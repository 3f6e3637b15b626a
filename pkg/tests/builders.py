"""Hand-built fixture artifacts shared by the tests."""

import io
import random
import struct
import wave

from gfm.artifact import CSV, PPM, TEXT, WAV, InformationArtifact

RED = (255, 0, 0)
GREEN = (0, 255, 0)
BLUE = (0, 0, 255)

# raster order: (0,0) blue, (1,0) red, (0,1) red, (1,1) green
PPM_2X2_PIXELS = [BLUE, RED, RED, GREEN]
PPM_2X2 = b"P6\n2 2\n255\n" + bytes(v for p in PPM_2X2_PIXELS for v in p)

CSV_3ROW = b'well,depth\nA1,100\nB2,250\n"C,3",75\n'

TEXT_3PARA = "First para\nstill first\n\nSecond é para\n\n\nthird\n".encode("utf-8")


def ppm_bytes(width, height, pixels, magic="P6"):
    header = f"{magic}\n{width} {height}\n255\n".encode()
    if magic == "P6":
        return header + bytes(v for p in pixels for v in p)
    rows = []
    for y in range(height):
        row = pixels[y * width:(y + 1) * width]
        rows.append("  ".join(" ".join(str(v) for v in p) for p in row))
    return header + ("\n".join(rows) + "\n").encode()


def random_pixels(rng, width, height, palette=(RED, GREEN, BLUE, (0, 0, 0))):
    return [rng.choice(palette) for _ in range(width * height)]


def ppm_8x8(seed=8):
    rng = random.Random(seed)
    return ppm_bytes(8, 8, random_pixels(rng, 8, 8))


# 8x6 scene: three red pixels scattered over a non-red background
SCENE_RED = ((2, 1), (5, 3), (3, 4))


def scene_pixels(seed=6):
    rng = random.Random(seed)
    pixels = random_pixels(rng, 8, 6, palette=(GREEN, BLUE, (0, 0, 0), (255, 255, 255)))
    for x, y in SCENE_RED:
        pixels[y * 8 + x] = RED
    return pixels


def wav_bytes(seconds=30, rate=8000, channels=1, sampwidth=2):
    frames = seconds * rate
    buf = io.BytesIO()
    with wave.open(buf, "wb") as w:
        w.setnchannels(channels)
        w.setsampwidth(sampwidth)
        w.setframerate(rate)
        if sampwidth == 2:
            data = b"".join(struct.pack("<h", (i * 37) % 20000 - 10000)
                            for i in range(frames * channels))
        else:
            data = bytes((i * 7) % 256 for i in range(frames * channels))
        w.writeframes(data)
    return buf.getvalue()


def artifact(name, media_type, content):
    return InformationArtifact(name, media_type, content)


def ppm2():
    return artifact("img2.ppm", PPM, PPM_2X2)


def ppm8():
    return artifact("img8.ppm", PPM, ppm_8x8())


def scene():
    return artifact("img1.ppm", PPM, ppm_bytes(8, 6, scene_pixels()))


def wav30():
    return artifact("clip.wav", WAV, WAV30)


def csv3():
    return artifact("wells.csv", CSV, CSV_3ROW)


def text3():
    return artifact("notes.txt", TEXT, TEXT_3PARA)


WAV30 = wav_bytes()
