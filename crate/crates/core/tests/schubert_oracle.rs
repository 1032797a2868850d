mod common;

use common::{euler_sym, grassmannian_integral, lines_on_hypersurface, Poly2};
use num_bigint::BigInt;

#[test]
fn grassmannian_degrees() {
    // deg G(2,N) in the Plücker embedding is a Catalan number
    let sigma1 = Poly2::linear(1, 1);
    for (n, catalan) in [(3u32, 1), (4, 2), (5, 5), (6, 14)] {
        assert_eq!(grassmannian_integral(n, &sigma1.pow(2 * (n - 2))), BigInt::from(catalan));
    }
}

#[test]
fn lines_on_cubic_surface() {
    assert_eq!(lines_on_hypersurface(4), BigInt::from(27));
}

#[test]
fn lines_on_quintic_threefold() {
    assert_eq!(grassmannian_integral(5, &euler_sym(5)), BigInt::from(2875));
    assert_eq!(lines_on_hypersurface(5), BigInt::from(2875));
}
