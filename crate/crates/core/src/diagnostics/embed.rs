use crate::error::{Error, Result};

/// Lagged vectors `(x[t], x[t+tau], ..., x[t+(d-1)tau])`, `N - (d-1)tau` of them.
pub fn delay_embed(series: &[f64], d: usize, tau: usize) -> Result<Vec<Vec<f64>>> {
    let span = check(series.len(), d, tau)?;
    Ok((0..series.len() - span)
        .map(|t| (0..d).map(|i| series[t + i * tau]).collect())
        .collect())
}

/// Row-major flat form of [`delay_embed`].
pub(crate) fn delay_embed_flat(series: &[f64], d: usize, tau: usize) -> Result<Vec<f64>> {
    let span = check(series.len(), d, tau)?;
    let n = series.len() - span;
    let mut out = Vec::with_capacity(n * d);
    for t in 0..n {
        out.extend((0..d).map(|i| series[t + i * tau]));
    }
    Ok(out)
}

fn check(len: usize, d: usize, tau: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidArgument("embedding dimension must be >= 1".into()));
    }
    if tau == 0 && d > 1 {
        return Err(Error::InvalidArgument("delay must be >= 1".into()));
    }
    let span = (d - 1) * tau;
    if len <= span {
        return Err(Error::SeriesTooShort { len, min: span + 1 });
    }
    Ok(span)
}
