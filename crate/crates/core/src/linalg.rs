//! Dense complex Gaussian elimination for the handful-of-unknowns systems
//! that appear in the coherence solve.

use num_complex::Complex;

use crate::scalar::Real;

/// Solves `a · x = b` in place (row-major `a`, `n × n`), leaving `x` in `b`.
///
/// Returns `None` when a pivot vanishes relative to the largest matrix entry.
pub fn solve_in_place<T: Real>(a: &mut [Complex<T>], b: &mut [Complex<T>], n: usize) -> Option<()> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);

    let scale = a.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    if !(scale > T::zero()) || !scale.is_finite() {
        return None;
    }
    let tiny = scale * T::epsilon();

    for col in 0..n {
        let (piv, piv_mag) = (col..n)
            .map(|r| (r, a[r * n + col].norm()))
            .fold((col, T::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(piv_mag > tiny) {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let p = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            a[r * n + col] = Complex::new(T::zero(), T::zero());
            for c in col + 1..n {
                let v = a[col * n + c];
                a[r * n + c] -= f * v;
            }
            let v = b[col];
            b[r] -= f * v;
        }
    }

    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row * n + c] * b[c];
        }
        b[row] = acc / a[row * n + row];
    }
    Some(())
}
