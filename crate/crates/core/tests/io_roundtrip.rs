use std::fs::File;

use ncharm::axb::AxbFunction;
use ncharm::finite::{FiniteGroup, FiniteGroupFunction};
use ncharm::heisenberg::HFunction;
use ncharm::spherical::{radial_bump, RadialFunction};
use ncharm::{io, random, Complex64};

#[test]
fn functions_survive_a_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();

    let path = dir.path().join("finite.csv");
    for g in [FiniteGroup::S3, FiniteGroup::Cyclic(9)] {
        let f = FiniteGroupFunction::random(g, &mut random::rng(1));
        io::write_finite(File::create(&path).unwrap(), &f).unwrap();
        assert_eq!(io::read_finite(File::open(&path).unwrap(), g).unwrap(), f);
    }

    let path = dir.path().join("heisenberg.csv");
    let k = HFunction::from_fn(3.0, 8, |a, b, c| Complex64::new((-a * a - b * b).exp(), c * (-c * c).exp())).unwrap();
    io::write_heisenberg(File::create(&path).unwrap(), &k).unwrap();
    assert_eq!(io::read_heisenberg(File::open(&path).unwrap()).unwrap(), k);

    let path = dir.path().join("axb.csv");
    let f = AxbFunction::product_bump(1.0, 0.7, 1.25, 12, 1.0, 10).unwrap();
    io::write_axb(File::create(&path).unwrap(), &f).unwrap();
    let back = io::read_axb(File::open(&path).unwrap()).unwrap();
    assert_eq!(back.values, f.values);
    // the grid is rebuilt from the stored points, so the step may move by an ulp
    for (g, h) in [(back.log_a, f.log_a), (back.b, f.b)] {
        assert_eq!((g.start, g.len), (h.start, h.len));
        assert!((g.step - h.step).abs() <= 4.0 * f64::EPSILON * h.step);
    }

    let path = dir.path().join("radial.csv");
    let f = RadialFunction::from_fn(1.0, 33, radial_bump(1.0)).unwrap();
    io::write_radial(File::create(&path).unwrap(), &f).unwrap();
    let back = io::read_radial(File::open(&path).unwrap()).unwrap();
    assert_eq!((back.grid, back.values), (f.grid, f.values));
}

#[test]
fn malformed_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "index,re,im\n0,1.0,0.0\n1,abc,0.0\n").unwrap();
    assert!(io::read_finite(File::open(&path).unwrap(), FiniteGroup::Cyclic(2)).is_err());
    std::fs::write(&path, "").unwrap();
    assert!(io::read_radial(File::open(&path).unwrap()).is_err());
    assert!(io::read_heisenberg(File::open(&path).unwrap()).is_err());
}
