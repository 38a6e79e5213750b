//! Seeded synthetic inputs: planted-cluster citation counts, block
//! correlation matrices, exact and hooked rank-size series, and the bundled
//! 21-journal demo matrix.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal, Poisson};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::matrix::{CitationMatrix, JournalLabel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Correlation matrix with `within` inside each block and `between` across.
pub fn block_correlation(sizes: &[usize], within: f64, between: f64) -> Mat {
    let block: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect();
    let n = block.len();
    Mat::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else if block[i] == block[j] {
            within
        } else {
            between
        }
    })
}

/// Parameters of the planted-cluster count generator.
///
/// Cell `(i, j)` is Poisson with mean
/// `base * s_i * t_j * a_ij * g_ij`, where `s_i` is the cited journal's
/// size, `t_j` the citing journal's size, `a_ij` a lognormal affinity that
/// is much larger within a cluster, and `g_ij ~ Gamma(shape, 1/shape)` a
/// unit-mean contagion factor. The first journal of every cluster is a
/// heavy citer; the rest cite one to two orders of magnitude less.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSpec {
    pub sizes: Vec<usize>,
    pub base: f64,
    pub within: f64,
    pub between: f64,
    pub affinity_sd: f64,
    /// `s_i = 10^U(0, size_decades)`.
    pub size_decades: f64,
    /// Exponent range of `t_j` for the leading journal of each cluster.
    pub lead_decades: (f64, f64),
    /// Exponent range of `t_j` for the other members.
    pub rest_decades: (f64, f64),
    pub gamma_shape: f64,
    pub self_boost: f64,
}

impl Default for ClusterSpec {
    fn default() -> Self {
        ClusterSpec {
            sizes: vec![5, 4, 4, 4, 2, 2],
            base: 10.0,
            within: 30.0,
            between: 1.0,
            affinity_sd: 0.3,
            size_decades: 1.0,
            lead_decades: (3.0, 3.5),
            rest_decades: (1.0, 2.0),
            gamma_shape: 5.0,
            self_boost: 2.0,
        }
    }
}

impl ClusterSpec {
    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Cluster index of every journal.
    pub fn membership(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .enumerate()
            .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err(Error::Parameter("cluster sizes must be positive".into()));
        }
        let positive = [
            self.base,
            self.within,
            self.between,
            self.gamma_shape,
            self.self_boost,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Parameter("generator scales must be positive".into()));
        }
        if [self.affinity_sd, self.size_decades]
            .iter()
            .any(|v| v.is_nan() || *v < 0.0)
        {
            return Err(Error::Parameter("spreads must be non-negative".into()));
        }
        for (lo, hi) in [self.lead_decades, self.rest_decades] {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(Error::Parameter(format!("empty decade range [{lo}, {hi})")));
            }
        }
        Ok(())
    }
}

/// Draws a count matrix, rows = cited journals, columns = citing journals.
pub fn clustered_counts(spec: &ClusterSpec, seed: u64) -> Result<Mat> {
    spec.validate()?;
    let member = spec.membership();
    let n = member.len();
    let mut r = rng(seed);
    let lead: Vec<bool> = (0..n)
        .map(|i| i == 0 || member[i] != member[i - 1])
        .collect();

    let s: Vec<f64> = (0..n)
        .map(|_| 10f64.powf(r.random_range(0.0..=spec.size_decades)))
        .collect();
    let t: Vec<f64> = lead
        .iter()
        .map(|&is_lead| {
            let (lo, hi) = if is_lead {
                spec.lead_decades
            } else {
                spec.rest_decades
            };
            10f64.powf(r.random_range(lo..hi))
        })
        .collect();
    let noise = Normal::new(0.0, spec.affinity_sd).map_err(|e| Error::Parameter(e.to_string()))?;
    let contagion = Gamma::new(spec.gamma_shape, 1.0 / spec.gamma_shape)
        .map_err(|e| Error::Parameter(e.to_string()))?;

    let mut out = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let affinity = if member[i] == member[j] {
                spec.within
            } else {
                spec.between
            };
            let mut lambda = spec.base * s[i] * t[j] * affinity * noise.sample(&mut r).exp();
            if i == j {
                lambda *= spec.self_boost;
            }
            lambda *= contagion.sample(&mut r);
            let draw = Poisson::new(lambda).map_err(|e| Error::Parameter(e.to_string()))?;
            out[(i, j)] = draw.sample(&mut r);
        }
    }
    Ok(out)
}

/// [`clustered_counts`] wrapped with ids `c{cluster}j{member}`.
pub fn clustered_matrix(spec: &ClusterSpec, seed: u64) -> Result<CitationMatrix> {
    let cells = clustered_counts(spec, seed)?;
    let mut labels = Vec::with_capacity(spec.n());
    for (c, &size) in spec.sizes.iter().enumerate() {
        for k in 0..size {
            labels.push(
                JournalLabel::new(format!("c{}j{}", c + 1, k + 1))
                    .with_class(format!("cluster{}", c + 1)),
            );
        }
    }
    CitationMatrix::new(labels, cells)
}

/// `c * r^a` for ranks `1..=n`.
pub fn powerlaw_series(c: f64, a: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|r| c * (r as f64).powf(a)).collect()
}

/// A power law whose first `head` ranks are flattened well below the line,
/// the "hook" seen in saturated rank-size plots. Values stay strictly
/// decreasing.
pub fn hooked_series(c: f64, a: f64, n: usize, head: usize) -> Vec<f64> {
    let mut v = powerlaw_series(c, a, n);
    if head == 0 || head >= n {
        return v;
    }
    let knee = v[head];
    for r in 1..=head {
        v[r - 1] = knee * (1.0 + 0.05 * (head + 1 - r) as f64);
    }
    v
}

/// Row `i` holds an exact power law `c_i * r^{a_i}` over `n` ranks, spread
/// over the columns in a shuffled order. Returns the matrix and `(c_i, a_i)`.
pub fn powerlaw_matrix(n: usize, seed: u64) -> Result<(CitationMatrix, Vec<(f64, f64)>)> {
    build_rank_matrix(n, seed, |_, c, a| powerlaw_series(c, a, n))
}

/// Like [`powerlaw_matrix`] but every even-indexed row carries a hook of
/// `head` ranks. The returned flags mark hooked rows.
pub fn hooked_powerlaw_matrix(
    n: usize,
    head: usize,
    seed: u64,
) -> Result<(CitationMatrix, Vec<bool>)> {
    let (m, _) = build_rank_matrix(n, seed, |i, c, a| {
        if i % 2 == 0 {
            hooked_series(c, a, n, head)
        } else {
            powerlaw_series(c, a, n)
        }
    })?;
    let flags = (0..n).map(|i| i % 2 == 0 && head > 0 && head < n).collect();
    Ok((m, flags))
}

fn build_rank_matrix(
    n: usize,
    seed: u64,
    series: impl Fn(usize, f64, f64) -> Vec<f64>,
) -> Result<(CitationMatrix, Vec<(f64, f64)>)> {
    if n < 3 {
        return Err(Error::Parameter(
            "need at least 3 journals for rank-size rows".into(),
        ));
    }
    let mut r = rng(seed);
    let mut cells = Mat::zeros(n, n);
    let mut params = Vec::with_capacity(n);
    for i in 0..n {
        let c = 10f64.powf(r.random_range(1.0..=6.0));
        let a = r.random_range(-3.0..-0.5);
        let mut cols: Vec<usize> = (0..n).collect();
        cols.shuffle(&mut r);
        for (v, &j) in series(i, c, a).into_iter().zip(&cols) {
            cells[(i, j)] = v;
        }
        params.push((c, a));
    }
    let labels = (0..n)
        .map(|i| JournalLabel::new(format!("p{}", i + 1)))
        .collect();
    Ok((CitationMatrix::new(labels, cells)?, params))
}

/// Journals of the demo set: (id, title, class group), grouped by planted
/// cluster. The first member of each group is its heavy citer.
pub const DEMO_JOURNALS: [(&str, &str, &str); 21] = [
    (
        "JACS",
        "Journal of the American Chemical Society",
        "Chemistry",
    ),
    (
        "AngewChem",
        "Angewandte Chemie-International Edition",
        "Chemistry",
    ),
    ("ChemCommun", "Chemical Communications", "Chemistry"),
    ("ChemEurJ", "Chemistry-A European Journal", "Chemistry"),
    ("ChemRev", "Chemical Reviews", "Chemistry"),
    (
        "JOrgChem",
        "Journal of Organic Chemistry",
        "Organic chemistry",
    ),
    (
        "TetrahedronLett",
        "Tetrahedron Letters",
        "Organic chemistry",
    ),
    ("Tetrahedron", "Tetrahedron", "Organic chemistry"),
    ("OrgLett", "Organic Letters", "Organic chemistry"),
    (
        "OrgBiomolChem",
        "Organic and Biomolecular Chemistry",
        "Organic chemistry",
    ),
    ("InorgChem", "Inorganic Chemistry", "Inorganic chemistry"),
    ("DaltonT", "Dalton Transactions", "Inorganic chemistry"),
    (
        "Organometallics",
        "Organometallics",
        "Organometallic chemistry and compounds",
    ),
    (
        "JOrganometChem",
        "Journal of Organometallic Chemistry",
        "Organometallic chemistry and compounds",
    ),
    (
        "JChemPhys",
        "Journal of Chemical Physics",
        "Physical and theoretical chemistry",
    ),
    (
        "JPhysChemA",
        "Journal of Physical Chemistry A",
        "Physical and theoretical chemistry",
    ),
    (
        "JPhysChemB",
        "Journal of Physical Chemistry B",
        "Physical and theoretical chemistry",
    ),
    ("Langmuir", "Langmuir", "Surface chemistry"),
    (
        "Macromolecules",
        "Macromolecules",
        "Polymers. Macromolecules",
    ),
    ("Science", "Science", "Science (General)"),
    ("BiochemistryUS", "Biochemistry-US", "Animal biochemistry"),
];

pub const DEMO_SIZES: [usize; 6] = [5, 5, 4, 2, 3, 2];
pub const DEMO_SEED: u64 = 2003;

/// Published cells the demo honours: self-citations of the two largest
/// journals and the two cells between them.
pub const JACS_SELF: f64 = 20_469.0;
pub const SCIENCE_SELF: f64 = 3_397.0;
/// Citations from Science to JACS.
pub const SCIENCE_TO_JACS: f64 = 304.0;
/// Citations from JACS to Science.
pub const JACS_TO_SCIENCE: f64 = 2_776.0;

pub fn demo_spec() -> ClusterSpec {
    ClusterSpec {
        sizes: DEMO_SIZES.to_vec(),
        base: 0.03,
        ..ClusterSpec::default()
    }
}

/// The bundled 21-journal matrix. Counts are synthetic; the four published
/// cells are fixed, Science is the smallest citer of JACS, and JACS is the
/// largest citer of Science after Science itself.
pub fn demo_matrix(seed: u64) -> Result<CitationMatrix> {
    let mut cells = clustered_counts(&demo_spec(), seed)?;
    let jacs = 0;
    let science = DEMO_JOURNALS
        .iter()
        .position(|j| j.0 == "Science")
        .expect("listed");
    let n = DEMO_JOURNALS.len();
    for j in 0..n {
        if j != jacs && j != science && cells[(jacs, j)] <= SCIENCE_TO_JACS {
            cells[(jacs, j)] += SCIENCE_TO_JACS + 1.0;
        }
        if j != science && j != jacs && cells[(science, j)] >= JACS_TO_SCIENCE {
            cells[(science, j)] = 2_000.0 + cells[(science, j)] % 700.0;
        }
    }
    cells[(jacs, jacs)] = JACS_SELF;
    cells[(science, science)] = SCIENCE_SELF;
    cells[(jacs, science)] = SCIENCE_TO_JACS;
    cells[(science, jacs)] = JACS_TO_SCIENCE;
    let labels = DEMO_JOURNALS
        .iter()
        .map(|(id, name, class)| JournalLabel::new(*id).with_name(*name).with_class(*class))
        .collect();
    CitationMatrix::new(labels, cells)
}
