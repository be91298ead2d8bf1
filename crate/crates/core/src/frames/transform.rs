use std::io::{Read, Write};

use super::FrameSpec;
use crate::calculus::{ScalarFilter, SpectralCalculus};
use crate::chebyshev::Damping;
use crate::spectrum::Partition;
use crate::{Error, Result, Scalar};

/// Spectral graph wavelet transform `f -> (phi(L) f, psi(s_1 L) f, ..., psi(s_J L) f)`.
pub struct Sgwt<'c, T: Scalar, C: SpectralCalculus<T>> {
    calc: &'c C,
    frame: FrameSpec<T>,
    bank: C::Bank,
}

impl<'c, T: Scalar, C: SpectralCalculus<T>> Sgwt<'c, T, C> {
    pub fn new(calc: &'c C, frame: FrameSpec<T>) -> Result<Self> {
        let filters: Vec<ScalarFilter<'_, T>> = (0..frame.band_count())
            .map(|j| Box::new(move |l: T| frame.band_response(j, l)) as ScalarFilter<'_, T>)
            .collect();
        let bank = calc.prepare(&filters)?;
        Ok(Self { calc, frame, bank })
    }

    pub fn frame(&self) -> &FrameSpec<T> {
        &self.frame
    }

    pub fn forward(&self, f: &[T]) -> Result<Vec<Vec<T>>> {
        self.calc.analyze(&self.bank, f)
    }

    pub fn adjoint(&self, bands: &[Vec<T>]) -> Result<Vec<T>> {
        if bands.len() != self.frame.band_count() {
            return Err(Error::DimensionMismatch {
                expected: self.frame.band_count(),
                actual: bands.len(),
            });
        }
        let refs: Vec<&[T]> = bands.iter().map(Vec::as_slice).collect();
        self.calc.synthesize(&self.bank, &refs)
    }
}

pub fn sgwt_forward<T: Scalar, C: SpectralCalculus<T>>(calc: &C, frame: &FrameSpec<T>, f: &[T]) -> Result<Vec<Vec<T>>> {
    Sgwt::new(calc, *frame)?.forward(f)
}

pub fn sgwt_adjoint<T: Scalar, C: SpectralCalculus<T>>(
    calc: &C,
    frame: &FrameSpec<T>,
    bands: &[Vec<T>],
) -> Result<Vec<T>> {
    Sgwt::new(calc, *frame)?.adjoint(bands)
}

/// LocLet transform over groups of partition intervals.
///
/// Group `g` with interval set `S_g` uses the filters
/// `lambda -> band_response(j, lambda) * 1_{S_g}(lambda)`, composed at the
/// scalar level and expanded jointly, so every `(group, band)` pair shares
/// one basis sweep. Singleton groups give the per-interval transform.
pub struct LocLetTransform<'c, T: Scalar, C: SpectralCalculus<T>> {
    calc: &'c C,
    frame: FrameSpec<T>,
    partition: Partition<T>,
    groups: Vec<Vec<usize>>,
    bank: C::Bank,
}

impl<'c, T: Scalar, C: SpectralCalculus<T>> LocLetTransform<'c, T, C> {
    /// One group per interval of the partition.
    pub fn per_interval(calc: &'c C, frame: FrameSpec<T>, partition: &Partition<T>) -> Result<Self> {
        let groups = (0..partition.len()).map(|k| vec![k]).collect();
        Self::grouped(calc, frame, partition, groups)
    }

    pub fn grouped(
        calc: &'c C,
        frame: FrameSpec<T>,
        partition: &Partition<T>,
        groups: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidParameter(
                "LocLet transform needs at least one group".into(),
            ));
        }
        if groups.iter().flatten().any(|&k| k >= partition.len()) {
            return Err(Error::InvalidParameter("group refers to a missing interval".into()));
        }
        if partition.lambda_max() < calc.lambda_max() * (T::one() - T::lit(1e-12)) {
            return Err(Error::InvalidParameter(format!(
                "partition ends at {} but the spectrum extends to {}",
                partition.lambda_max(),
                calc.lambda_max()
            )));
        }
        let mut filters: Vec<ScalarFilter<'_, T>> = Vec::with_capacity(groups.len() * frame.band_count());
        for members in &groups {
            for j in 0..frame.band_count() {
                let part = partition.clone();
                let members = members.clone();
                filters.push(Box::new(move |l: T| match part.locate(l) {
                    Some(k) if members.contains(&k) => frame.band_response(j, l),
                    _ => T::zero(),
                }));
            }
        }
        let bank = calc.prepare(&filters)?;
        Ok(Self {
            calc,
            frame,
            partition: partition.clone(),
            groups,
            bank,
        })
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn frame(&self) -> &FrameSpec<T> {
        &self.frame
    }

    /// Bands of every group: `result[g][j]`.
    pub fn forward(&self, f: &[T]) -> Result<Vec<Vec<Vec<T>>>> {
        let flat = self.calc.analyze(&self.bank, f)?;
        let bands = self.frame.band_count();
        let mut out = Vec::with_capacity(self.groups.len());
        let mut iter = flat.into_iter();
        for _ in 0..self.groups.len() {
            out.push(iter.by_ref().take(bands).collect());
        }
        Ok(out)
    }

    /// Adjoint of [`forward`](Self::forward); groups given as `None` contribute nothing.
    pub fn adjoint(&self, coeffs: &[Option<&[Vec<T>]>]) -> Result<Vec<T>> {
        if coeffs.len() != self.groups.len() {
            return Err(Error::DimensionMismatch {
                expected: self.groups.len(),
                actual: coeffs.len(),
            });
        }
        let zeros = vec![T::zero(); self.calc.n()];
        let bands = self.frame.band_count();
        let mut refs: Vec<&[T]> = Vec::with_capacity(coeffs.len() * bands);
        for group in coeffs {
            match group {
                Some(g) => {
                    if g.len() != bands {
                        return Err(Error::DimensionMismatch {
                            expected: bands,
                            actual: g.len(),
                        });
                    }
                    refs.extend(g.iter().map(Vec::as_slice));
                }
                None => refs.extend(std::iter::repeat(zeros.as_slice()).take(bands)),
            }
        }
        self.calc.synthesize(&self.bank, &refs)
    }

    /// Packs a per-interval forward result with its provenance.
    pub fn coefficients(&self, f: &[T]) -> Result<LocLetCoefficients<T>> {
        if self.groups.iter().enumerate().any(|(k, g)| g.as_slice() != [k]) {
            return Err(Error::InvalidParameter(
                "coefficient records require the per-interval layout".into(),
            ));
        }
        Ok(LocLetCoefficients {
            n: f.len(),
            boundaries: self.partition.boundaries().to_vec(),
            scale_count: self.frame.scale_count(),
            degree: self.calc.expansion_degree(),
            damping: self.calc.expansion_damping(),
            bands: self.forward(f)?,
        })
    }
}

/// `W^{I_k} f` for every interval `k` and band `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocLetCoefficients<T> {
    pub n: usize,
    pub boundaries: Vec<T>,
    pub scale_count: usize,
    /// Chebyshev degree, `None` for exact projections.
    pub degree: Option<usize>,
    pub damping: Damping,
    /// `bands[k][j]`, each of length `n`.
    pub bands: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> LocLetCoefficients<T> {
    pub fn interval_count(&self) -> usize {
        self.bands.len()
    }

    /// `sum_k W^{I_k} f`, band by band.
    pub fn summed_over_intervals(&self) -> Vec<Vec<T>> {
        let mut out = vec![vec![T::zero(); self.n]; self.scale_count + 1];
        for interval in &self.bands {
            for (acc, band) in out.iter_mut().zip(interval) {
                acc.iter_mut().zip(band).for_each(|(a, &b)| *a += b);
            }
        }
        out
    }

    /// Header rows `n,K,J,degree,damping` and the boundaries, then one row
    /// per `(k, j)` band.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        w.write_record(["n", "K", "J", "degree", "damping"])?;
        w.write_record([
            self.n.to_string(),
            self.interval_count().to_string(),
            self.scale_count.to_string(),
            self.degree.map(|d| d.to_string()).unwrap_or_else(|| "exact".into()),
            match self.damping {
                Damping::None => "none".into(),
                Damping::Jackson => "jackson".to_string(),
            },
        ])?;
        let mut row = vec!["boundaries".to_string()];
        row.extend(self.boundaries.iter().map(|b| format!("{:e}", b.to_f64_lossy())));
        w.write_record(&row)?;
        for (k, interval) in self.bands.iter().enumerate() {
            for (j, band) in interval.iter().enumerate() {
                let mut row = vec![k.to_string(), j.to_string()];
                row.extend(band.iter().map(|v| format!("{:e}", v.to_f64_lossy())));
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .flexible(true)
            .has_headers(true)
            .from_reader(input);
        let mut records = reader.records();
        let mut next = |what: &str| -> Result<csv::StringRecord> {
            records
                .next()
                .ok_or_else(|| Error::Parse {
                    line: 0,
                    message: format!("missing {what} record"),
                })?
                .map_err(Error::from)
        };
        let parse_err = |line: u64, message: String| Error::Parse {
            line: line as usize,
            message,
        };
        let meta = next("metadata")?;
        let line = meta.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| meta.get(i).unwrap_or("").to_string();
        let n: usize = field(0).parse().map_err(|_| parse_err(line, "bad n".into()))?;
        let k_count: usize = field(1).parse().map_err(|_| parse_err(line, "bad K".into()))?;
        let scale_count: usize = field(2).parse().map_err(|_| parse_err(line, "bad J".into()))?;
        let degree = match field(3).as_str() {
            "exact" => None,
            d => Some(d.parse().map_err(|_| parse_err(line, "bad degree".into()))?),
        };
        let damping = match field(4).as_str() {
            "none" => Damping::None,
            "jackson" => Damping::Jackson,
            other => return Err(parse_err(line, format!("unknown damping '{other}'"))),
        };
        let parse_values = |rec: &csv::StringRecord, skip: usize| -> Result<Vec<T>> {
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            rec.iter()
                .skip(skip)
                .map(|v| {
                    v.parse::<f64>()
                        .map(T::lit)
                        .map_err(|_| parse_err(line, format!("bad value '{v}'")))
                })
                .collect()
        };
        let boundaries = parse_values(&next("boundaries")?, 1)?;
        let mut bands = vec![Vec::with_capacity(scale_count + 1); k_count];
        for (k, interval) in bands.iter_mut().enumerate() {
            for j in 0..=scale_count {
                let rec = next("band")?;
                let line = rec.position().map(|p| p.line()).unwrap_or(0);
                if rec.get(0) != Some(&k.to_string()) || rec.get(1) != Some(&j.to_string()) {
                    return Err(parse_err(line, format!("expected band ({k}, {j})")));
                }
                let values = parse_values(&rec, 2)?;
                if values.len() != n {
                    return Err(parse_err(
                        line,
                        format!("band has {} values, expected {n}", values.len()),
                    ));
                }
                interval.push(values);
            }
        }
        Ok(Self {
            n,
            boundaries,
            scale_count,
            degree,
            damping,
            bands,
        })
    }
}

/// Per-interval LocLet coefficients of `f`.
pub fn loclet_forward<T: Scalar, C: SpectralCalculus<T>>(
    calc: &C,
    frame: &FrameSpec<T>,
    partition: &Partition<T>,
    f: &[T],
) -> Result<LocLetCoefficients<T>> {
    LocLetTransform::per_interval(calc, *frame, partition)?.coefficients(f)
}

/// `sum_k W^{I_k *} eta_k`
pub fn loclet_adjoint<T: Scalar, C: SpectralCalculus<T>>(
    calc: &C,
    frame: &FrameSpec<T>,
    partition: &Partition<T>,
    coeffs: &LocLetCoefficients<T>,
) -> Result<Vec<T>> {
    if coeffs.interval_count() != partition.len() || coeffs.scale_count != frame.scale_count() || coeffs.n != calc.n() {
        return Err(Error::InvalidParameter(
            "coefficients do not match the frame and partition".into(),
        ));
    }
    let transform = LocLetTransform::per_interval(calc, *frame, partition)?;
    let groups: Vec<Option<&[Vec<T>]>> = coeffs.bands.iter().map(|b| Some(b.as_slice())).collect();
    transform.adjoint(&groups)
}
