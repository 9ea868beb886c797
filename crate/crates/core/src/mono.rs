//! Multistatic-to-monostatic conversion.
//!
//! Each (tx, rx) sample is phase-corrected by `e^{-jk·d_y²/(4R₀)}` and
//! re-indexed at the pair midpoint, producing the echo of an equivalent
//! virtual monostatic array. The approximation degrades as the pair
//! separation `d_y` grows relative to `R₀`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::types::{check_uniform, ApertureConfig, EchoCube, EchoKind, UNIFORM_TOL};

/// Bookkeeping reported alongside the converted cube.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversionReport {
    /// Number of virtual positions fed by more than one (tx, rx) pair.
    pub duplicate_positions: usize,
    /// Number of redundant pair samples folded into those positions.
    pub folded_pairs: usize,
}

/// Phase applied to a pair with separation `d_y` at wavenumber `k`.
pub fn compensation_phase<T: Real>(k: T, d_y: T, r0: T) -> T {
    -k * d_y * d_y / (T::lit(4.0) * r0)
}

pub fn multistatic_to_monostatic<T: Real>(
    echo: &EchoCube<T>,
    cfg: &ApertureConfig<T>,
) -> Result<(EchoCube<T>, ConversionReport)> {
    if echo.kind != EchoKind::Multistatic {
        return Err(Error::WrongKind {
            expected: "multistatic",
            found: echo.kind.name(),
        });
    }
    echo.validate()?;
    if !(cfg.r0 > T::zero()) {
        return Err(Error::param("aperture.r0_m", "must be > 0"));
    }

    let (ntx, nrx) = (echo.tx_offsets.len(), echo.rx_offsets.len());
    let npair = ntx * nrx;
    let pairs = crate::types::virtual_elements(&echo.tx_offsets, &echo.rx_offsets);

    // (absolute position, flat lane index) for every capture/pair
    let mut slots: Vec<(T, usize)> = Vec::with_capacity(echo.lane_len());
    for (ic, &yc) in echo.y.iter().enumerate() {
        for (ip, e) in pairs.iter().enumerate() {
            slots.push((yc + e.y, ic * npair + ip));
        }
    }
    slots.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)));

    let tol = T::lit(UNIFORM_TOL);
    let mut groups: Vec<(T, Vec<usize>)> = Vec::new();
    for (y, lane) in slots {
        match groups.last_mut() {
            Some((gy, members)) if (y - *gy).abs() <= tol => members.push(lane),
            _ => groups.push((y, vec![lane])),
        }
    }

    if groups.len() > 2 {
        let step = (groups[groups.len() - 1].0 - groups[0].0) / T::from_usize_lossy(groups.len() - 1);
        for w in groups.windows(2) {
            let gap = w[1].0 - w[0].0;
            if (gap - step).abs() > tol {
                return Err(Error::NonUniformGrid {
                    from_m: w[0].0.to_f64_lossless(),
                    to_m: w[1].0.to_f64_lossless(),
                    gap_m: gap.to_f64_lossless(),
                    expected_m: step.to_f64_lossless(),
                });
            }
        }
    }

    let report = ConversionReport {
        duplicate_positions: groups.iter().filter(|g| g.1.len() > 1).count(),
        folded_pairs: groups.iter().map(|g| g.1.len() - 1).sum(),
    };
    if report.duplicate_positions > 0 {
        log::warn!(
            "{} virtual positions are shared by several tx/rx pairs; their samples are averaged",
            report.duplicate_positions
        );
    }

    let ys: Vec<T> = groups.iter().map(|g| g.0).collect();
    check_uniform("virtual y", &ys)?;
    let mut out = EchoCube::zeros_monostatic(echo.theta.clone(), echo.k.clone(), ys);
    let ny = out.y.len();
    let nk = echo.k.len();
    let lane = echo.lane_len();

    // correction factor per (k, pair)
    let factors: Vec<Complex<T>> = echo
        .k
        .iter()
        .flat_map(|&k| {
            pairs.iter().map(move |e| {
                let (s, c) = compensation_phase(k, e.d_y, cfg.r0).sin_cos();
                Complex::new(c, s)
            })
        })
        .collect();

    out.data
        .par_chunks_mut(ny)
        .enumerate()
        .for_each(|(tk, dst)| {
            let ik = tk % nk;
            let src = &echo.data[tk * lane..][..lane];
            let f = &factors[ik * npair..][..npair];
            for (g, (_, members)) in dst.iter_mut().zip(&groups) {
                let mut acc = Complex::new(T::zero(), T::zero());
                for &m in members {
                    acc += src[m] * f[m % npair];
                }
                *g = if members.len() == 1 {
                    acc
                } else {
                    acc / T::from_usize_lossy(members.len())
                };
            }
        });
    Ok((out, report))
}
