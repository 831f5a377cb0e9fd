import numpy as np
import pytest

from seqrecon.sqrio import read_sqr, write_sqr


@pytest.mark.parametrize("arr", [
    np.linspace(0, 1, 12).reshape(3, 4),
    (np.arange(6).reshape(2, 3) + 1j * np.arange(6).reshape(2, 3)),
    np.array([[0, 255], [7, 1]], dtype=np.uint8),
])
def test_roundtrip(tmp_path, arr):
    p = tmp_path / "a.sqr"
    write_sqr(p, arr)
    back = read_sqr(p)
    assert back.dtype.kind == np.asarray(arr).dtype.kind
    np.testing.assert_array_equal(back, arr)


def test_bool_becomes_uint8(tmp_path):
    p = tmp_path / "b.sqr"
    write_sqr(p, np.array([[True, False], [False, True]]))
    back = read_sqr(p)
    assert back.dtype == np.uint8
    np.testing.assert_array_equal(back, [[1, 0], [0, 1]])


def test_writes_are_byte_identical(tmp_path):
    rng = np.random.default_rng(3)
    arr = rng.normal(size=(17, 9))
    p1, p2 = tmp_path / "x1.sqr", tmp_path / "x2.sqr"
    write_sqr(p1, arr)
    write_sqr(p2, arr.copy(order="F"))
    assert p1.read_bytes() == p2.read_bytes()


def test_header_layout(tmp_path):
    p = tmp_path / "h.sqr"
    write_sqr(p, np.zeros((2, 5)))
    raw = p.read_bytes()
    assert raw[:4] == b"SQRA"
    assert int.from_bytes(raw[4:8], "little") == 2
    assert int.from_bytes(raw[8:12], "little") == 5
    assert raw[12] == 0
    assert raw[13:16] == b"\x00\x00\x00"
    assert len(raw) == 16 + 2 * 5 * 8


def test_rejects_bad_magic(tmp_path):
    p = tmp_path / "bad.sqr"
    write_sqr(p, np.zeros((2, 2)))
    raw = bytearray(p.read_bytes())
    raw[:4] = b"NOPE"
    p.write_bytes(bytes(raw))
    with pytest.raises(ValueError, match="magic"):
        read_sqr(p)


def test_rejects_truncation(tmp_path):
    p = tmp_path / "t.sqr"
    write_sqr(p, np.zeros((4, 4)))
    p.write_bytes(p.read_bytes()[:-8])
    with pytest.raises(ValueError, match="payload"):
        read_sqr(p)


def test_rejects_short_header(tmp_path):
    p = tmp_path / "s.sqr"
    p.write_bytes(b"SQRA\x01")
    with pytest.raises(ValueError, match="truncated"):
        read_sqr(p)


def test_rejects_non_2d():
    with pytest.raises(ValueError, match="2D"):
        write_sqr("/dev/null", np.zeros(3))


def test_rejects_unsupported_dtype():
    with pytest.raises(ValueError, match="dtype"):
        write_sqr("/dev/null", np.zeros((2, 2), dtype=np.int32))
