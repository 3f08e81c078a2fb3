//! Published 51-run results, transcribed verbatim in `grades.csv` layout.
//! Read-only reference data; never regenerated.

use super::{parse_grades, GradeRow};
use crate::stats::Sign;

pub const MANET_D30: &str = "\
function,dimension,best,worst,mean,median,std
1,30,3.71e+02,1.33e+03,7.94e+02,8.02e+02,2.03e+02
3,30,3.69e+04,7.10e+04,5.85e+04,5.85e+04,6.46e+03
4,30,1.46e-05,3.99e+00,5.88e-01,6.79e-04,1.41e+00
5,30,0.00e+00,1.99e+00,5.85e-01,1.34e-07,6.59e-01
6,30,0.00e+00,0.00e+00,0.00e+00,0.00e+00,0.00e+00
7,30,3.26e+01,3.41e+01,3.33e+01,3.33e+01,3.91e-01
8,30,0.00e+00,4.97e+00,2.29e+00,1.99e+00,1.15e+00
9,30,0.00e+00,0.00e+00,0.00e+00,0.00e+00,0.00e+00
10,30,1.09e+04,1.13e+04,1.11e+04,1.11e+04,1.19e+02
";

pub const JSO_D30: &str = "\
function,dimension,best,worst,mean,median,std
1,30,0.00e+00,0.00e+00,0.00e+00,0.00e+00,0.00e+00
3,30,0.00e+00,0.00e+00,0.00e+00,0.00e+00,0.00e+00
4,30,5.86e+01,6.41e+01,5.87e+01,5.86e+01,7.78e-01
5,30,3.98e+00,1.32e+01,8.56e+00,8.02e+00,2.10e+00
6,30,0.00e+00,0.00e+00,0.00e+00,0.00e+00,0.00e+00
7,30,3.61e+01,4.31e+01,3.89e+01,3.91e+01,1.46e+00
8,30,4.97e+00,1.30e+01,9.09e+00,8.96e+00,1.84e+00
9,30,0.00e+00,0.00e+00,0.00e+00,0.00e+00,0.00e+00
10,30,1.04e+03,2.04e+03,1.53e+03,1.49e+03,2.77e+02
";

pub const MANET_D50: &str = "\
function,dimension,best,worst,mean,median,std
1,50,3.67e+02,2.06e+03,1.39e+03,1.46e+03,3.71e+02
3,50,9.80e+04,1.42e+05,1.23e+05,1.25e+05,8.88e+03
4,50,3.10e-06,1.53e-03,8.22e-04,9.96e-04,4.46e-04
5,50,1.99e+00,1.09e+01,6.15e+00,5.97e+00,2.20e+00
6,50,0.00e+00,0.00e+00,0.00e+00,0.00e+00,0.00e+00
7,50,5.49e+01,5.65e+01,5.58e+01,5.59e+01,3.62e-01
8,50,1.99e+00,8.95e+00,5.41e+00,5.97e+00,1.99e+00
9,50,0.00e+00,0.00e+00,0.00e+00,0.00e+00,0.00e+00
10,50,1.86e+04,1.88e+04,1.87e+04,1.87e+04,6.25e+01
";

pub const JSO_D50: &str = "\
function,dimension,best,worst,mean,median,std
1,50,0.00e+00,0.00e+00,0.00e+00,0.00e+00,0.00e+00
3,50,0.00e+00,0.00e+00,0.00e+00,0.00e+00,0.00e+00
4,50,1.32e-04,1.42e+02,5.62e+01,2.85e+01,4.88e+01
5,50,8.96e+00,2.39e+01,1.64e+01,1.62e+01,3.46e+00
6,50,0.00e+00,0.00e+00,0.00e+00,0.00e+00,0.00e+00
7,50,5.75e+01,7.42e+01,6.65e+01,6.66e+01,3.47e+00
8,50,9.95e+00,2.41e+01,1.70e+01,1.70e+01,3.14e+00
9,50,0.00e+00,0.00e+00,0.00e+00,0.00e+00,0.00e+00
10,50,2.40e+03,3.79e+03,3.14e+03,3.23e+03,3.67e+02
";

/// Published MaNet-vs-jSO signs, identical for both dimensions.
const SIGNS: [(usize, Sign); 9] = [
    (1, Sign::Worse),
    (3, Sign::Worse),
    (4, Sign::Better),
    (5, Sign::Better),
    (6, Sign::Equal),
    (7, Sign::Better),
    (8, Sign::Better),
    (9, Sign::Equal),
    (10, Sign::Worse),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Manet,
    Jso,
}

/// Raw CSV text of one published table half, if `dimension` was reported.
pub fn raw(source: Source, dimension: usize) -> Option<&'static str> {
    match (source, dimension) {
        (Source::Manet, 30) => Some(MANET_D30),
        (Source::Jso, 30) => Some(JSO_D30),
        (Source::Manet, 50) => Some(MANET_D50),
        (Source::Jso, 50) => Some(JSO_D50),
        _ => None,
    }
}

pub fn rows(source: Source, dimension: usize) -> Option<Vec<GradeRow>> {
    raw(source, dimension).map(|text| parse_grades(text).expect("embedded table parses"))
}

/// Published sign for `function`.
pub fn published_sign(function: usize) -> Option<Sign> {
    SIGNS.iter().find(|(f, _)| *f == function).map(|(_, s)| *s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::grades_csv;

    #[test]
    fn tables_round_trip_byte_for_byte() {
        for source in [Source::Manet, Source::Jso] {
            for d in [30, 50] {
                let text = raw(source, d).unwrap();
                assert_eq!(grades_csv(&rows(source, d).unwrap()), text);
            }
        }
        assert!(raw(Source::Jso, 10).is_none());
    }
}
