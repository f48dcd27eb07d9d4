use std::fmt::Write;

use super::BergmanSample;
use crate::linalg::CMat;

/// `row,col,re,im` lines for every entry, preceded by `#` header lines.
pub fn matrix_csv(m: &CMat, header: &[&str]) -> String {
    let mut s = String::new();
    for h in header {
        let _ = writeln!(s, "# {h}");
    }
    s.push_str("row,col,re,im\n");
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            let _ = writeln!(s, "{i},{j},{:.17e},{:.17e}", z.re, z.im);
        }
    }
    s
}

/// Node coordinates, `ρ̄_k` and `|dρ̄_k|` (Euclidean in moment coordinates).
pub fn bergman_csv(b: &BergmanSample, dim: usize, header: &[&str]) -> String {
    let mut s = String::new();
    for h in header {
        let _ = writeln!(s, "# {h}");
    }
    s.push_str(if dim == 1 { "x,rho_bar,grad_norm\n" } else { "x,y,rho_bar,grad_norm\n" });
    for ((p, r), g) in b.points.iter().zip(&b.rho_bar).zip(&b.grad_rho_bar) {
        let gn = (g[0] * g[0] + g[1] * g[1]).sqrt();
        if dim == 1 {
            let _ = writeln!(s, "{:.17e},{:.17e},{:.17e}", p[0], r, gn);
        } else {
            let _ = writeln!(s, "{:.17e},{:.17e},{:.17e},{:.17e}", p[0], p[1], r, gn);
        }
    }
    s
}
