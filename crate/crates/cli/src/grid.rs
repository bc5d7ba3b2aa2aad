//! Parameter axes given on the command line.

/// Parses `x`, `a,b,c` or `start:end:count`. With `log`, `start:end:count`
/// is spaced geometrically.
pub fn parse_axis(text: &str, log: bool) -> Result<Vec<f64>, String> {
    let text = text.trim();
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{s}` is not a number (in `{text}`)"))
    };
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range `{text}` must look like start:end:count"));
        }
        let (start, end) = (parse(parts[0])?, parse(parts[1])?);
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("count `{}` is not a positive integer", parts[2]))?;
        if count == 0 {
            return Err(format!("range `{text}` has zero points"));
        }
        if log && !(start > 0.0 && end > 0.0) {
            return Err(format!("logarithmic range `{text}` needs positive endpoints"));
        }
        if count == 1 {
            vec![start]
        } else {
            let mut v: Vec<f64> = (0..count)
                .map(|i| {
                    let t = i as f64 / (count - 1) as f64;
                    if log {
                        (start.ln() + (end.ln() - start.ln()) * t).exp()
                    } else {
                        start + (end - start) * t
                    }
                })
                .collect();
            // Endpoints exactly as written.
            v[0] = start;
            v[count - 1] = end;
            v
        }
    } else {
        text.split(',').map(parse).collect::<Result<Vec<_>, _>>()?
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(format!("`{text}` contains non-finite values"));
    }
    if values.windows(2).any(|w| w[1] < w[0]) {
        return Err(format!("`{text}` must be ascending"));
    }
    Ok(values)
}
