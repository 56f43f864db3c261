import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from fmdkit.io import (
    SignalFormatError,
    display_mapping,
    read_pgm,
    read_signal,
    write_pgm,
    write_signal,
    write_spiral_csv,
    write_spiral_svg,
)
from fmdkit.signal import energy
from fmdkit.spiral import theodorus_2d, theodorus_3d


def test_csv1d_round_trip_is_bit_exact(tmp_path):
    x = np.random.default_rng(0).standard_normal(257) * 10.0 ** np.arange(-128, 129)
    p = tmp_path / "x.csv"
    write_signal(x, p, "csv1d")
    np.testing.assert_array_equal(read_signal(p, "csv1d"), x)


def test_csv2d_round_trip(tmp_path):
    x = np.random.default_rng(1).standard_normal((5, 7))
    p = tmp_path / "x.csv"
    write_signal(x, p, "csv2d")
    np.testing.assert_array_equal(read_signal(p, "csv2d"), x)


def test_csv1d_tolerates_blank_lines_and_header_free_input(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("1\n\n2.5\n -3e-2 \n")
    np.testing.assert_array_equal(read_signal(p, "csv1d"), [1, 2.5, -0.03])


def test_p2_read(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_text("P2\n# comment\n2 2\n255\n1 2\n3 4\n")
    img, maxval = read_pgm(p)
    assert maxval == 255
    np.testing.assert_array_equal(img, [[1, 2], [3, 4]])
    assert energy(read_signal(p, "pgm")) == 30


def test_p5_read_8_and_16_bit(tmp_path):
    p = tmp_path / "b.pgm"
    p.write_bytes(b"P5\n3 1\n255\n" + bytes([0, 128, 255]))
    np.testing.assert_array_equal(read_signal(p, "pgm"), [[0, 128, 255]])
    q = tmp_path / "c.pgm"
    q.write_bytes(b"P5 2 1 65535\n" + np.array([1, 65535], dtype=">u2").tobytes())
    img, maxval = read_pgm(q)
    assert maxval == 65535
    np.testing.assert_array_equal(img, [[1, 65535]])


@pytest.mark.parametrize("binary", [True, False])
def test_pgm_write_read_round_trip(tmp_path, binary):
    x = np.random.default_rng(2).integers(0, 256, (9, 13)).astype(float)
    p = tmp_path / "r.pgm"
    assert write_pgm(p, x, binary=binary) == (0.0, 1.0)
    np.testing.assert_array_equal(read_signal(p, "pgm"), x)


def test_pgm_16_bit_write(tmp_path):
    x = np.array([[0.0, 1000.0], [65535.0, 7.0]])
    p = tmp_path / "w.pgm"
    write_pgm(p, x, maxval=65535)
    np.testing.assert_array_equal(read_signal(p, "pgm"), x)


@pytest.mark.parametrize(
    "content, fragment",
    [
        (b"", "empty"),
        (b"P3\n1 1\n255\n0 0 0\n", "byte 0"),
        (b"P2\n2 2\n255\n1 2 3\n", "expected 4 pixels"),
        (b"P5\n2 2\n255\n\x01", "truncated"),
        (b"P2\n2 x\n255\n", "bad height"),
        (b"P2\n1 1\n70000\n1\n", "maxval"),
        (b"P2\n1 1\n10\n11\n", "exceeds maxval"),
        (b"P2\n0 1\n255\n", "zero-sized"),
    ],
)
def test_malformed_pgm(tmp_path, content, fragment):
    p = tmp_path / "bad.pgm"
    p.write_bytes(content)
    with pytest.raises(SignalFormatError, match=fragment):
        read_signal(p, "pgm")


def test_malformed_csv_reports_line(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1\n2\nabc\n")
    with pytest.raises(SignalFormatError, match=":3:"):
        read_signal(p, "csv1d")
    p.write_text("1\nnan\n")
    with pytest.raises(SignalFormatError, match="non-finite"):
        read_signal(p, "csv1d")
    p.write_text("1,2\n3\n")
    with pytest.raises(SignalFormatError, match=":2: expected 2 columns"):
        read_signal(p, "csv2d")
    p.write_text("\n\n")
    with pytest.raises(SignalFormatError, match="no samples"):
        read_signal(p, "csv1d")


def test_unknown_format_and_missing_file(tmp_path):
    with pytest.raises(ValueError, match="unknown format"):
        read_signal(tmp_path / "x", "wav")
    with pytest.raises(OSError):
        read_signal(tmp_path / "missing.csv", "csv1d")


def test_display_mapping_cases():
    assert display_mapping(np.zeros((2, 2))) == (0.0, 0.0)
    assert display_mapping(np.array([[0.0, 255.0]])) == (0.0, 1.0)
    off, scale = display_mapping(np.array([[-1.0, 3.0]]))
    assert (off, scale) == (-1.0, 255 / 4)
    assert display_mapping(np.full((2, 2), -4.0)) == (-4.0, 0.0)


def test_pgm_display_copy_of_signed_component(tmp_path):
    x = np.array([[-1.0, 0.0], [1.0, 3.0]])
    p = tmp_path / "s.pgm"
    off, scale = write_signal(x, p, "pgm")
    back = read_signal(p, "pgm")
    np.testing.assert_allclose(back / scale + off, x, atol=0.5 / scale)


def test_writers_reject_wrong_shapes(tmp_path):
    with pytest.raises(ValueError):
        write_signal(np.ones((2, 2)), tmp_path / "a.csv", "csv1d")
    with pytest.raises(ValueError):
        write_signal(np.ones(3), tmp_path / "a.pgm", "pgm")
    with pytest.raises(ValueError):
        write_signal(np.array([1j]), tmp_path / "a.csv", "csv1d")
    with pytest.raises(OSError):
        write_signal(np.ones(3), tmp_path / "no" / "dir.csv", "csv1d")


def test_spiral_csv(tmp_path):
    p = tmp_path / "s.csv"
    write_spiral_csv(p, theodorus_2d(17))
    lines = p.read_text().splitlines()
    assert lines[0] == "l,T_1,T_2,phi,norm"
    assert len(lines) == 19
    last = lines[-1].split(",")
    assert last[0] == "17"
    assert float(last[-1]) == pytest.approx(math.sqrt(17), rel=1e-15)
    assert lines[1].split(",")[3] == ""


def test_spiral_csv_3d_has_no_angle_column(tmp_path):
    p = tmp_path / "s.csv"
    write_spiral_csv(p, theodorus_3d(30))
    assert p.read_text().splitlines()[0] == "l,T_1,T_2,T_3,norm"


@pytest.mark.parametrize("path_fn", [lambda: theodorus_2d(17), lambda: theodorus_3d(40)])
def test_spiral_svg_is_valid_xml(tmp_path, path_fn):
    spiral = path_fn()
    p = tmp_path / "s.svg"
    desc = write_spiral_svg(p, spiral)
    root = ET.parse(p).getroot()
    ns = {"s": "http://www.w3.org/2000/svg"}
    poly = root.find("s:polyline", ns)
    pts = poly.get("points").split()
    assert len(pts) == spiral.n_steps + 1
    assert desc in root.find("s:metadata", ns).text
    assert len(root.find("s:g", ns)) == spiral.n_steps
    if spiral.dim == 2:
        x, y = map(float, pts[-1].split(","))
        assert math.hypot(x, y) == pytest.approx(math.sqrt(17), abs=1e-5)
