import numpy as np
import pytest
from mpmath import mp, mpf

from hjbplan import (
    ElevationRaster,
    Grid2D,
    ScalarField,
    export_field,
    export_raster,
    load_field,
    load_raster,
    slope_magnitude,
    speed_from_slope,
)
from hjbplan.gridio import RasterParseError


@pytest.fixture
def sample_field():
    g = Grid2D(6, 4, xmax=3.0, ymax=1.0)
    rng = np.random.default_rng(11)
    vals = rng.standard_normal(g.shape) * 1e3
    vals[2, 2] = np.inf  # unreachable sentinel survives the round trip
    return ScalarField(g, vals)


def test_text_round_trip(tmp_path, sample_field):
    p = tmp_path / "f.txt"
    export_field(sample_field, p, "text")
    back = load_field(p)
    assert back.grid == sample_field.grid
    a, b = sample_field.values, back.values
    fin = np.isfinite(a)
    assert (np.isposinf(b) == np.isposinf(a)).all()
    assert np.allclose(a[fin], b[fin], rtol=1e-15, atol=0)


def test_text_inf_token(tmp_path, sample_field):
    p = tmp_path / "f.txt"
    export_field(sample_field, p, "text")
    assert " inf" in p.read_text() or "inf " in p.read_text()


def test_packed_round_trip_bit_identical(tmp_path, sample_field):
    p = tmp_path / "f.hjbf"
    export_field(sample_field, p, "packed")
    raw = p.read_bytes()
    assert raw[:4] == b"HJBF" and raw[4] == 1
    back = load_field(p)
    assert back.values.tobytes() == sample_field.values.tobytes()


def test_packed_deterministic(tmp_path, sample_field):
    p1, p2 = tmp_path / "a.hjbf", tmp_path / "b.hjbf"
    export_field(sample_field, p1, "packed")
    export_field(sample_field, p2, "packed")
    assert p1.read_bytes() == p2.read_bytes()


def test_unknown_format(tmp_path, sample_field):
    with pytest.raises(ValueError):
        export_field(sample_field, tmp_path / "f.bin", "csv")


def test_parse_error_line_numbers(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("3 3 0.5 0.5\n1 2 3\n4 x 6\n7 8 9\n")
    with pytest.raises(RasterParseError) as err:
        load_field(p)
    assert ":3:" in str(err.value)


def test_parse_error_ragged_row(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("3 3 0.5 0.5\n1 2 3\n4 5\n7 8 9\n")
    with pytest.raises(RasterParseError) as err:
        load_field(p)
    assert "expected 3 values" in str(err.value)


def test_parse_error_missing_rows(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("3 3 0.5 0.5\n1 2 3\n")
    with pytest.raises(RasterParseError):
        load_field(p)


def test_packed_dims_mismatch(tmp_path, sample_field):
    p = tmp_path / "f.hjbf"
    export_field(sample_field, p, "packed")
    data = p.read_bytes()
    p.write_bytes(data[:-8])  # truncate one value
    with pytest.raises(RasterParseError):
        load_field(p)


def test_row_orientation(tmp_path):
    # the first data row holds the top of the grid (largest y)
    g = Grid2D(2, 2)
    X, Y = g.meshgrid()
    fld = ScalarField(g, Y.copy())
    p = tmp_path / "f.txt"
    export_field(fld, p, "text")
    lines = p.read_text().strip().splitlines()
    first_row = [float(t) for t in lines[1].split()]
    assert first_row == [1.0, 1.0, 1.0]


def test_raster_round_trip_and_nodata(tmp_path):
    z = np.arange(12, dtype=float).reshape(4, 3)
    z[1, 1] = np.nan
    raster = ElevationRaster(dx=10.0, dy=10.0, xorigin=100.0, yorigin=200.0,
                             nodata=-9999.0, z=z)
    p = tmp_path / "z.asc"
    export_raster(raster, p)
    back = load_raster(p)
    assert back.dx == 10.0 and back.xorigin == 100.0 and back.nodata == -9999.0
    assert np.isnan(back.z[1, 1])
    fin = np.isfinite(z)
    assert np.array_equal(back.z[fin], z[fin])
    mask = back.domain_mask()
    assert not mask.inside[1, 1]


def test_raster_three_by_three_zeros(tmp_path):
    p = tmp_path / "z.asc"
    p.write_text("3 3 1 1 0 0 -9999\n" + "0 0 0\n" * 3)
    raster = load_raster(p)
    assert (raster.z == 0).all()
    f = speed_from_slope(raster)
    assert np.allclose(f, 1.11 * np.exp(-4.0 / 2345.0))


def test_speed_law_values():
    # frozen against a 40-digit mpmath evaluation of 1.11*exp(-(100s+2)^2/2345)
    mp.dps = 40
    cases = {0.0: 1.1081082237220439, 0.5: 0.35038186755270884, 0.1: 1.0438885865036367}
    for s, frozen in cases.items():
        exact = float(mpf("1.11") * mp.e ** (-((100 * mpf(s) + 2) ** 2) / 2345))
        assert exact == pytest.approx(frozen, rel=1e-12)
    z = np.zeros((5, 5))
    for i in range(5):
        z[i, :] = i * 0.5  # slope 0.5 along x with dx = 1
    f = speed_from_slope(z, 1.0, 1.0)
    assert f[2, 2] == pytest.approx(cases[0.5], rel=1e-12)


def test_speed_law_steep_is_obstacle():
    z = np.zeros((5, 5))
    for i in range(5):
        z[i, :] = i * 10.0  # grade 10: far into the Gaussian tail
    f = speed_from_slope(z, 1.0, 1.0)
    assert f[2, 2] < 1e-6


def test_slope_one_sided_at_edges_and_nodata():
    z = np.zeros((4, 4))
    for i in range(4):
        z[i, :] = float(i)
    z[2, 1] = np.nan
    s = slope_magnitude(z, 1.0, 1.0)
    assert s[0, 0] == pytest.approx(1.0)  # one-sided at the edge
    assert s[2, 1] == 0.0  # nodata point itself
    # neighbor of the hole falls back to a one-sided difference
    assert s[1, 1] == pytest.approx(1.0)
