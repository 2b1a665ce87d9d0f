//! Number lists: `2,4,8` or inclusive ranges `start:step:stop`, mixed freely
//! (`0:5:20,45,90`).

const MAX_LIST_LEN: usize = 100_000;

fn parse_item<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    let s = s.trim();
    s.parse::<T>().map_err(|_| format!("not a number: {s:?}"))
}

fn expand_range(parts: &[&str], out: &mut Vec<f64>) -> Result<(), String> {
    let [start, step, stop] = parts else {
        return Err("range must be start:step:stop".into());
    };
    let (start, step, stop): (f64, f64, f64) = (parse_item(start)?, parse_item(step)?, parse_item(stop)?);
    if !(start.is_finite() && step.is_finite() && stop.is_finite()) {
        return Err("range bounds must be finite".into());
    }
    if step <= 0.0 {
        return Err(format!("range step must be positive, got {step}"));
    }
    if stop < start {
        return Err(format!("range stop {stop} is below start {start}"));
    }
    let count = ((stop - start) / step + 1e-9).floor();
    if count >= MAX_LIST_LEN as f64 {
        return Err(format!("range has more than {MAX_LIST_LEN} points"));
    }
    for i in 0..=count as usize {
        out.push(start + i as f64 * step);
    }
    Ok(())
}

/// Parses a non-empty list of finite reals.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let parts: Vec<&str> = item.split(':').collect();
        if parts.len() == 1 {
            let v: f64 = parse_item(parts[0])?;
            if !v.is_finite() {
                return Err(format!("not a finite number: {:?}", parts[0].trim()));
            }
            out.push(v);
        } else {
            expand_range(&parts, &mut out)?;
        }
        if out.len() > MAX_LIST_LEN {
            return Err(format!("list has more than {MAX_LIST_LEN} entries"));
        }
    }
    Ok(out)
}

/// Parses a non-empty list of non-negative integers; ranges must land on integers.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let parts: Vec<&str> = item.split(':').collect();
        if parts.len() == 1 {
            out.push(parse_item(parts[0])?);
        } else {
            let [start, step, stop] = parts[..] else {
                return Err("range must be start:step:stop".into());
            };
            let (start, step, stop): (usize, usize, usize) =
                (parse_item(start)?, parse_item(step)?, parse_item(stop)?);
            if step == 0 {
                return Err("range step must be positive".into());
            }
            if stop < start {
                return Err(format!("range stop {stop} is below start {start}"));
            }
            if (stop - start) / step >= MAX_LIST_LEN {
                return Err(format!("range has more than {MAX_LIST_LEN} points"));
            }
            out.extend((start..=stop).step_by(step));
        }
        if out.len() > MAX_LIST_LEN {
            return Err(format!("list has more than {MAX_LIST_LEN} entries"));
        }
    }
    Ok(out)
}

/// Comma-joined list that parses back to the same values.
pub fn format_list<T: std::fmt::Display>(values: &[T]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ranges_and_singletons() {
        assert_eq!(parse_f64_list("0:5:20").unwrap(), vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(parse_f64_list(" 1.5 , 2").unwrap(), vec![1.5, 2.0]);
        assert_eq!(parse_f64_list("0:5:12,90").unwrap(), vec![0.0, 5.0, 10.0, 90.0]);
        assert_eq!(parse_f64_list("0:0.1:0.3").unwrap().len(), 4);
        assert_eq!(parse_usize_list("2,4,8").unwrap(), vec![2, 4, 8]);
        assert_eq!(parse_usize_list("8:8:32").unwrap(), vec![8, 16, 24, 32]);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "1,,2", "a", "1:2", "1:0:3", "5:1:0", "1:2:3:4", "nan", "inf", "0:1e-9:1e9"] {
            assert!(parse_f64_list(bad).is_err(), "{bad}");
        }
        for bad in ["-1", "1.5", "4:0:8", "8:1:4", "0:1:1000000000"] {
            assert!(parse_usize_list(bad).is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn format_round_trips(v in proptest::collection::vec(-1e6f64..1e6, 1..20)) {
            prop_assert_eq!(parse_f64_list(&format_list(&v)).unwrap(), v);
        }

        #[test]
        fn usize_round_trips(v in proptest::collection::vec(0usize..100_000, 1..20)) {
            prop_assert_eq!(parse_usize_list(&format_list(&v)).unwrap(), v);
        }

        #[test]
        fn never_panics(s in "[0-9:,. e+-]{0,24}") {
            let _ = parse_f64_list(&s);
            let _ = parse_usize_list(&s);
        }
    }
}
