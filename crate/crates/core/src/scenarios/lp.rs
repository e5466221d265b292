//! Phase-one simplex for `A x = b, x >= 0` feasibility.

/// Returns a nonnegative solution of `a x = b`, or `None` when the system is
/// infeasible. `a` is row-major with `rows` rows and `cols` columns.
pub(crate) fn nonnegative_solution(
    a: &[f64],
    rows: usize,
    cols: usize,
    b: &[f64],
) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), rows * cols);
    debug_assert_eq!(b.len(), rows);
    if rows == 0 {
        return Some(vec![0.0; cols]);
    }
    let scale = a
        .iter()
        .chain(b.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(1.0);
    let eps = 1e-11 * scale;

    // Tableau columns: x (cols), artificials (rows), rhs.
    let width = cols + rows + 1;
    let rhs = width - 1;
    let mut t = vec![0.0; (rows + 1) * width];
    for i in 0..rows {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..cols {
            t[i * width + j] = sign * a[i * cols + j];
        }
        t[i * width + cols + i] = 1.0;
        t[i * width + rhs] = sign * b[i];
    }
    // Objective row holds reduced costs of `min sum(artificials)`, negated.
    let obj = rows * width;
    for i in 0..rows {
        for j in 0..width {
            if j < cols || j == rhs {
                t[obj + j] -= t[i * width + j];
            }
        }
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    // Bland's rule guarantees termination.
    let max_pivots = 50 * (rows + cols) + 1000;
    for _ in 0..max_pivots {
        let Some(enter) = (0..cols + rows).find(|&j| t[obj + j] < -eps) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            let coef = t[i * width + enter];
            if coef > eps {
                let ratio = t[i * width + rhs] / coef;
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - eps || (ratio <= lr + eps && basis[i] < basis[li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (row, _) = leave?;
        pivot(&mut t, width, rows + 1, row, enter);
        basis[row] = enter;
    }

    let infeasibility = -t[obj + rhs];
    if infeasibility > 1e-9 * scale {
        return None;
    }
    let mut x = vec![0.0; cols];
    for (i, &var) in basis.iter().enumerate() {
        if var < cols {
            x[var] = t[i * width + rhs].max(0.0);
        }
    }
    Some(x)
}

fn pivot(t: &mut [f64], width: usize, height: usize, row: usize, col: usize) {
    let p = t[row * width + col];
    for j in 0..width {
        t[row * width + j] /= p;
    }
    for i in 0..height {
        if i == row {
            continue;
        }
        let factor = t[i * width + col];
        if factor != 0.0 {
            for j in 0..width {
                t[i * width + j] -= factor * t[row * width + j];
            }
        }
    }
}
