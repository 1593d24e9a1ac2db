use pyo3::ffi::c_str;
use pyo3::prelude::*;

use halfline_py::halfline_py;

#[test]
fn module_round_trip() {
    pyo3::append_to_inittab!(halfline_py);
    Python::initialize();
    Python::attach(|py| {
        py.run(
            c_str!(
                r#"
import halfline_py as hp
assert abs(hp.g(0.0) - 1.0) < 1e-12
assert hp.g(2.5) == hp.g(-2.5)
q = hp.Potential.exponential(-3.0, 0.5235987755982988, 1.0)
eigs = hp.find_eigenvalues(q, (-5.0, 5.0, -5.0, 5.0))
assert len(eigs) == 1 and eigs[0]["residual"] <= 1e-10
region = hp.enclosure_region(q, "thm2")
assert region.contains(eigs[0]["lambda"])
try:
    hp.enclosure_region(q, "cor1", {"r": 2.0})
    raise AssertionError("cor1 with r = 2 accepted")
except ValueError:
    pass
w = hp.Potential.from_toml('kind = "square_well"\nv0 = 1.0\nphi = 0.0\nwidth = 2.0')
assert abs(w.lebesgue_norm(1.0) - 2.0) < 1e-14
"#
            ),
            None,
            None,
        )
        .unwrap();
    });
}
