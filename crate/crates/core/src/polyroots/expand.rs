//! Monomial expansions in multiprecision.

use rug::Float;

use crate::mp::{ComplexField, Mpc};

/// Coefficients (ascending) of `prod_j (z - roots_j)` at `prec` bits.
pub fn expand_roots(roots: &[Mpc], prec: u32) -> Vec<Mpc> {
    let mut c = vec![Mpc::from_c64(prec, num_complex::Complex64::new(1.0, 0.0))];
    for r in roots {
        let r = r.with_prec(prec);
        let mut next = vec![Mpc::zero(prec); c.len() + 1];
        for (j, cj) in c.iter().enumerate() {
            next[j + 1].add_assign_ref(cj);
            let t = cj.mul(&r);
            next[j] = next[j].sub(&t);
        }
        c = next;
    }
    c
}

/// Coefficients of the derivative of the polynomial with coefficients `c`.
pub fn differentiate(c: &[Mpc]) -> Vec<Mpc> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, ck)| {
            let mut d = ck.clone();
            d.mul_real_assign(k as f64);
            d
        })
        .collect()
}

/// Low-order Taylor coefficients of `Q(c + w) = sum_a m_a prod_{b != a} (w - y_b)`
/// where `y_b = atoms_b - c`, i.e. of the numerator of `f'/f` after the
/// common factors of repeated roots are removed.
///
/// Returns `(q_0..q_order, bound_0..bound_order)`. `bound_j` is the same
/// coefficient computed with every `y_b` replaced by `-|y_b|`, which bounds
/// the size of the terms that cancel in `q_j` and so sets the scale of its
/// rounding error.
pub fn centred_numerator(
    atoms: &[Mpc],
    mult: &[f64],
    c: &Mpc,
    order: usize,
    prec: u32,
) -> (Vec<Mpc>, Vec<Float>) {
    // Magnitudes only need a few bits, but a wide exponent range.
    const BOUND_PREC: u32 = 64;
    let len = order + 1;
    let c = c.with_prec(prec);
    let mut a = vec![Mpc::zero(prec); len];
    a[0] = c.lift(num_complex::Complex64::new(1.0, 0.0));
    let mut b = vec![Mpc::zero(prec); len];
    let mut a_abs = vec![Float::new(BOUND_PREC); len];
    a_abs[0] = Float::with_val(BOUND_PREC, 1);
    let mut b_abs = vec![Float::new(BOUND_PREC); len];
    for (atom, &m) in atoms.iter().zip(mult) {
        let y = atom.with_prec(prec).sub(&c);
        let y_abs = Float::with_val(BOUND_PREC, y.abs());
        // b <- b (w - y) + m a, then a <- a (w - y); both truncated.
        let mut nb = vec![Mpc::zero(prec); len];
        let mut na = vec![Mpc::zero(prec); len];
        let mut nb_abs = vec![Float::new(BOUND_PREC); len];
        let mut na_abs = vec![Float::new(BOUND_PREC); len];
        for j in 0..len {
            let mut tb = b[j].mul(&y);
            tb = if j > 0 { b[j - 1].sub(&tb) } else { tb.zero_like().sub(&tb) };
            let mut ma = a[j].clone();
            ma.mul_real_assign(m);
            nb[j] = tb.add(&ma);
            let ta = a[j].mul(&y);
            na[j] = if j > 0 { a[j - 1].sub(&ta) } else { ta.zero_like().sub(&ta) };

            let mut v = Float::with_val(BOUND_PREC, &b_abs[j] * &y_abs);
            if j > 0 {
                v += &b_abs[j - 1];
            }
            v += Float::with_val(BOUND_PREC, &a_abs[j] * m);
            nb_abs[j] = v;
            let mut v = Float::with_val(BOUND_PREC, &a_abs[j] * &y_abs);
            if j > 0 {
                v += &a_abs[j - 1];
            }
            na_abs[j] = v;
        }
        a = na;
        b = nb;
        a_abs = na_abs;
        b_abs = nb_abs;
    }
    (b, b_abs)
}
