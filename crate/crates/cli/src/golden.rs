//! Reference values shipped with the binary.

const SERIES: &str = include_str!("../data/series_kappa0.5_j1.csv");
const THETA8: &str = include_str!("../data/theta8_kappa0.5_mu0.02_nu0.1.csv");

/// One reference entry.
#[derive(Clone, Debug)]
pub struct Entry {
    pub index: Vec<usize>,
    pub value: f64,
}

/// Parse a CSV of integer index columns followed by a value column.
/// Lines starting with `#` and the header row are skipped.
pub fn parse(data: &str) -> Vec<Entry> {
    data.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let fields: Vec<&str> = l.split(',').collect();
            let (text, idx) = fields.split_last().expect("non-empty row");
            Entry {
                index: idx.iter().map(|s| s.parse().expect("integer index")).collect(),
                value: text.parse().expect("numeric value"),
            }
        })
        .collect()
}

/// Coefficients `c_{m,n}` for kappa = 1/2, j = 1.
pub fn series_table() -> Vec<Entry> {
    parse(SERIES)
}

/// Coefficients `delta_n` of `Theta_8` for kappa = 1/2, (mu, nu) = (0.02, 0.1).
pub fn theta8_coefficients() -> Vec<Entry> {
    parse(THETA8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(series_table().len(), 45);
        let t = theta8_coefficients();
        assert_eq!(t.len(), 17);
        assert_eq!(t[16].index, vec![16]);
        assert_eq!(t[15].value, -1e-26);
    }
}
