use polar_walsh::convert::{
    cartesian_to_polar, polar_to_cartesian, recenter, render_polar, CartesianImage,
};
use polar_walsh::filter::{remove_banding, FilterRequest};
use polar_walsh::geometry::{MeasureKind, PolarGrid};
use polar_walsh::imgio::{read_pgm, read_polar, write_pgm, write_polar, PgmMode};
use polar_walsh::metrics::{mse, Mask};
use polar_walsh::noise::{add_noise, gen_banding_polar, NoiseSpec};
use polar_walsh::transform::HybridConfig;
use tempfile::TempDir;

fn bands(rows: usize, cols: usize, n1: usize, n2: usize, spec: NoiseSpec) -> CartesianImage {
    let grid = PolarGrid::new(
        n1,
        n2,
        (rows.min(cols) / 2) as f64,
        MeasureKind::UniformArea,
    )
    .unwrap();
    render_polar(&gen_banding_polar(&grid, &spec).unwrap(), rows, cols, 0.0).unwrap()
}

#[test]
fn files_round_trip_through_polar_form() {
    let dir = TempDir::new().unwrap();
    let img = CartesianImage::from_fn(96, 128, |i, j| ((i * 7 + j * 3) % 256) as f64);
    let pgm = dir.path().join("img.pgm");
    write_pgm(&img, &pgm, PgmMode::P2).unwrap();
    assert_eq!(read_pgm(&pgm).unwrap(), img);

    let polar = cartesian_to_polar(&img, 16, 32, MeasureKind::UniformRadial).unwrap();
    let pwp = dir.path().join("img.pwp");
    write_polar(&polar, &pwp).unwrap();
    let back = read_polar(&pwp).unwrap();
    assert_eq!(back, polar);

    let cart = polar_to_cartesian(&back, 96, 128).unwrap();
    assert_eq!((cart.rows(), cart.cols()), (96, 128));
    assert!(polar_to_cartesian(&back, 128, 128).is_err());
}

#[test]
fn both_band_families_removed_together() {
    let (rows, cols) = (128, 128);
    let circ = bands(
        rows,
        cols,
        16,
        32,
        NoiseSpec::CircularBands {
            period: 4,
            amplitude: 30.0,
            measure: MeasureKind::UniformArea,
        },
    );
    let azim = bands(
        rows,
        cols,
        16,
        32,
        NoiseSpec::AzimuthalBands {
            period: 8,
            amplitude: 30.0,
        },
    );
    let base = CartesianImage::filled(rows, cols, 90.0);
    let noisy = add_noise(&add_noise(&base, &circ, false).unwrap(), &azim, true).unwrap();
    let req = FilterRequest {
        n1: 16,
        n2: 32,
        cflag: true,
        aflag: true,
        ..FilterRequest::default()
    };
    let out = remove_banding(&noisy, &req).unwrap();
    // Both band means (15 each) remain as an offset.
    let expect = CartesianImage::filled(rows, cols, 120.0);
    let mask = Mask::disk(rows, cols);
    assert!(mse(&expect, &out, Some(&mask)).unwrap() < 1e-18);
    let (dy, dx) = recenter(0, 0, rows, cols);
    assert!(dy * dy + dx * dx > 64 * 64);
    assert_eq!(out.get(0, 0), 255.0);
}

#[test]
fn shot_model_denoising_approaches_exact() {
    let (rows, cols) = (64, 64);
    let noise = bands(
        rows,
        cols,
        8,
        16,
        NoiseSpec::CircularBands {
            period: 2,
            amplitude: 40.0,
            measure: MeasureKind::UniformArea,
        },
    );
    let img = CartesianImage::from_fn(rows, cols, |i, j| 60.0 + (i + j) as f64);
    let noisy = add_noise(&img, &noise, true).unwrap();
    let exact_req = FilterRequest {
        n1: 8,
        n2: 16,
        cflag: true,
        ..FilterRequest::default()
    };
    let exact = remove_banding(&noisy, &exact_req).unwrap();
    let mask = Mask::disk(rows, cols);
    let err = |shots| {
        let req = FilterRequest {
            hybrid: HybridConfig::shots(shots, 3),
            ..exact_req
        };
        mse(&exact, &remove_banding(&noisy, &req).unwrap(), Some(&mask)).unwrap()
    };
    let coarse = err(1_000);
    let fine = err(1_000_000);
    assert!(fine < coarse, "{fine} vs {coarse}");
    assert!(fine < 25.0, "{fine}");
}
