use super::grid::{GridMap, State};

/// Per-cell Euclidean distance (cell units, center to center) to the nearest unviable cell.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl DistanceField {
    pub fn get(&self, s: State) -> Option<f64> {
        if s.row < 0 || s.col < 0 || s.row as usize >= self.height || s.col as usize >= self.width {
            return None;
        }
        Some(self.values[s.row as usize * self.width + s.col as usize])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Exact Euclidean distance transform over the unviable cells of `map`.
///
/// Only in-grid unviable cells are sources. A map without any gives `+inf` everywhere.
/// Two separable passes of the lower-envelope-of-parabolas construction; squared distances
/// stay integral, so the result is exact up to the final square root.
pub fn distance_transform(map: &GridMap) -> DistanceField {
    let (w, h) = (map.width(), map.height());
    // Column pass: squared vertical distance to the nearest source in the same column.
    let mut vertical = vec![f64::INFINITY; w * h];
    let mut column = vec![0.0; h];
    for c in 0..w {
        for (r, slot) in column.iter_mut().enumerate() {
            *slot = if map.is_viable(State::new(r as i32, c as i32)) {
                f64::INFINITY
            } else {
                0.0
            };
        }
        let out = lower_envelope(&column);
        for r in 0..h {
            vertical[r * w + c] = out[r];
        }
    }
    let mut values = vec![f64::INFINITY; w * h];
    for r in 0..h {
        let out = lower_envelope(&vertical[r * w..(r + 1) * w]);
        for c in 0..w {
            values[r * w + c] = out[c].sqrt();
        }
    }
    DistanceField {
        width: w,
        height: h,
        values,
    }
}

/// `out[q] = min_p (q - p)^2 + f[p]`, skipping infinite sites.
fn lower_envelope(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let sites: Vec<usize> = (0..n).filter(|&p| f[p].is_finite()).collect();
    if sites.is_empty() {
        return vec![f64::INFINITY; n];
    }
    // Intersection abscissa of the parabolas rooted at p and q (p < q).
    let meet = |p: usize, q: usize| -> f64 {
        let (pf, qf) = (p as f64, q as f64);
        ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf))
    };
    let mut hull: Vec<usize> = Vec::with_capacity(sites.len());
    let mut starts: Vec<f64> = Vec::with_capacity(sites.len());
    for &q in &sites {
        loop {
            match hull.last() {
                None => {
                    hull.push(q);
                    starts.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&p) => {
                    let s = meet(p, q);
                    if s <= *starts.last().unwrap() {
                        hull.pop();
                        starts.pop();
                    } else {
                        hull.push(q);
                        starts.push(s);
                        break;
                    }
                }
            }
        }
    }
    let mut out = vec![0.0; n];
    let mut k = 0;
    for (q, slot) in out.iter_mut().enumerate() {
        while k + 1 < hull.len() && starts[k + 1] < q as f64 {
            k += 1;
        }
        let p = hull[k];
        let d = q as f64 - p as f64;
        *slot = d * d + f[p];
    }
    out
}
