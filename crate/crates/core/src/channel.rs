//! Fading-channel link model: averaged bit error, block-coded packet loss,
//! and transmit energy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("channel parameter `{field}` invalid: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ChannelError {
    ChannelError::Invalid { field, reason: reason.into() }
}

/// Bit-error probability `p_b`, deep-fade probability `p_f`, correctable
/// errors per packet `t`, packet length `l` in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannelParams", into = "RawChannelParams")]
pub struct ChannelParams {
    p_b: f64,
    p_f: f64,
    t: u64,
    l: u64,
}

#[derive(Serialize, Deserialize)]
struct RawChannelParams {
    p_b: f64,
    #[serde(default)]
    p_f: f64,
    #[serde(default)]
    t: u64,
    l: u64,
}

impl TryFrom<RawChannelParams> for ChannelParams {
    type Error = ChannelError;

    fn try_from(r: RawChannelParams) -> Result<Self, Self::Error> {
        ChannelParams::new(r.p_b, r.p_f, r.t, r.l)
    }
}

impl From<ChannelParams> for RawChannelParams {
    fn from(p: ChannelParams) -> Self {
        RawChannelParams { p_b: p.p_b, p_f: p.p_f, t: p.t, l: p.l }
    }
}

impl Default for ChannelParams {
    /// `p_b = 0.001`, no fading, no correction, 1500-byte packets.
    fn default() -> Self {
        Self { p_b: 0.001, p_f: 0.0, t: 0, l: 12_000 }
    }
}

impl ChannelParams {
    pub fn new(p_b: f64, p_f: f64, t: u64, l: u64) -> Result<Self, ChannelError> {
        if !(0.0..=0.5).contains(&p_b) {
            return Err(invalid("p_b", format!("{p_b} outside [0, 0.5]")));
        }
        if !(0.0..=1.0).contains(&p_f) {
            return Err(invalid("p_f", format!("{p_f} outside [0, 1]")));
        }
        if l == 0 {
            return Err(invalid("l", "packet length must be positive"));
        }
        if t > l {
            return Err(invalid("t", format!("{t} exceeds packet length {l}")));
        }
        Ok(Self { p_b, p_f, t, l })
    }

    pub fn p_b(&self) -> f64 {
        self.p_b
    }

    pub fn p_f(&self) -> f64 {
        self.p_f
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn with_p_b(&self, p_b: f64) -> Result<Self, ChannelError> {
        Self::new(p_b, self.p_f, self.t, self.l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLinkBudget", into = "RawLinkBudget")]
pub struct LinkBudget {
    data_rate_bps: f64,
    tx_power_w: f64,
    overhead_factor: f64,
}

#[derive(Serialize, Deserialize)]
struct RawLinkBudget {
    data_rate_bps: f64,
    tx_power_w: f64,
    #[serde(default = "one")]
    overhead_factor: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawLinkBudget> for LinkBudget {
    type Error = ChannelError;

    fn try_from(r: RawLinkBudget) -> Result<Self, Self::Error> {
        LinkBudget::new(r.data_rate_bps, r.tx_power_w, r.overhead_factor)
    }
}

impl From<LinkBudget> for RawLinkBudget {
    fn from(b: LinkBudget) -> Self {
        RawLinkBudget { data_rate_bps: b.data_rate_bps, tx_power_w: b.tx_power_w, overhead_factor: b.overhead_factor }
    }
}

impl Default for LinkBudget {
    /// 143 Mb/s at 1 W, no protocol overhead.
    fn default() -> Self {
        Self { data_rate_bps: 143e6, tx_power_w: 1.0, overhead_factor: 1.0 }
    }
}

impl LinkBudget {
    pub fn new(data_rate_bps: f64, tx_power_w: f64, overhead_factor: f64) -> Result<Self, ChannelError> {
        if !(data_rate_bps.is_finite() && data_rate_bps > 0.0) {
            return Err(invalid("data_rate_bps", "must be positive"));
        }
        if !(tx_power_w.is_finite() && tx_power_w > 0.0) {
            return Err(invalid("tx_power_w", "must be positive"));
        }
        if !(overhead_factor.is_finite() && overhead_factor >= 1.0) {
            return Err(invalid("overhead_factor", "must be >= 1"));
        }
        Ok(Self { data_rate_bps, tx_power_w, overhead_factor })
    }

    pub fn data_rate_bps(&self) -> f64 {
        self.data_rate_bps
    }

    pub fn tx_power_w(&self) -> f64 {
        self.tx_power_w
    }

    pub fn overhead_factor(&self) -> f64 {
        self.overhead_factor
    }
}

/// `0.5 p_f + p_b (1 - p_f)`: a deep fade loses every bit with probability 1/2.
pub fn avg_bit_error(p: &ChannelParams) -> f64 {
    0.5 * p.p_f + p.p_b * (1.0 - p.p_f)
}

/// Probability that more than `t` of `l` bits are in error.
pub fn channel_loss(p: &ChannelParams) -> f64 {
    block_error_rate(avg_bit_error(p), p.l, p.t)
}

/// Upper binomial tail `P[X > t]` for `X ~ Bin(l, p_bar)`.
///
/// The pmf next to `t` is evaluated with Loader's saddle-point form, then
/// neighbouring terms follow by ratio, walking away from the mode until they
/// stop registering. Whichever tail lies away from the mode is summed
/// directly; the other is obtained by complement.
pub fn block_error_rate(p_bar: f64, l: u64, t: u64) -> f64 {
    debug_assert!((0.0..=0.5).contains(&p_bar));
    if t >= l || p_bar <= 0.0 {
        return 0.0;
    }
    let q = 1.0 - p_bar;
    if t == 0 {
        return (-(l as f64 * (-p_bar).ln_1p()).exp_m1()).clamp(0.0, 1.0);
    }
    let odds = p_bar / q;
    let mode = ((l + 1) as f64 * p_bar).floor() as u64;

    let mut terms = Vec::new();
    if t < mode {
        let mut k = t;
        let mut term = binom_pmf(k, l, p_bar, q);
        loop {
            terms.push(term);
            if k == 0 || term < f64::EPSILON * 1e-2 * terms[0] {
                break;
            }
            term *= k as f64 / ((l - k + 1) as f64 * odds);
            k -= 1;
        }
        (1.0 - neumaier_sum(terms)).clamp(0.0, 1.0)
    } else {
        let mut k = t + 1;
        let mut term = binom_pmf(k, l, p_bar, q);
        loop {
            terms.push(term);
            if k == l || term < f64::EPSILON * 1e-2 * terms[0] {
                break;
            }
            term *= (l - k) as f64 / (k + 1) as f64 * odds;
            k += 1;
        }
        neumaier_sum(terms).clamp(0.0, 1.0)
    }
}

/// `ln(n!) - ln(sqrt(2 pi n) (n/e)^n)` for `n` in `0..=15`.
#[allow(clippy::excessive_precision)]
const STIRLING_ERR: [f64; 16] = [
    0.0,
    0.081061466795327258,
    0.041340695955409294,
    0.027677925684998339,
    0.020790672103765093,
    0.016644691189821192,
    0.013876128823070748,
    0.01189670994589177,
    0.010411265261972096,
    0.0092554621827127329,
    0.0083305634333628713,
    0.0075736754879518408,
    0.0069428401072095299,
    0.0064089941880042071,
    0.0059513701127588477,
    0.0055547335519628014,
];

fn stirling_err(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15 {
        return STIRLING_ERR[n as usize];
    }
    let n = n as f64;
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x / np) + np - x`, computed without cancellation
/// when `x` is close to `np`.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1.. {
            ej *= v;
            let next = s + ej / f64::from(2 * j + 1);
            if next == s {
                return next;
            }
            s = next;
        }
    }
    x * (x / np).ln() + np - x
}

/// `P[X = k]` for `X ~ Bin(n, p)`, `q = 1 - p`, with relative error near
/// machine precision for any `n`.
fn binom_pmf(k: u64, n: u64, p: f64, q: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let nf = n as f64;
    if k == 0 {
        let lc = if p < 0.1 { -bd0(nf, nf * q) - nf * p } else { nf * q.ln() };
        return lc.exp();
    }
    if k == n {
        let lc = if q < 0.1 { -bd0(nf, nf * p) - nf * q } else { nf * p.ln() };
        return lc.exp();
    }
    let kf = k as f64;
    let lc = stirling_err(n) - stirling_err(k) - stirling_err(n - k) - bd0(kf, nf * p) - bd0(nf - kf, nf * q);
    let lf = std::f64::consts::TAU.ln() + kf.ln() + (-kf / nf).ln_1p();
    (lc - 0.5 * lf).exp()
}

pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Energy to push `l_bits` through the link: `P * (l / R) * overhead`.
pub fn comm_energy(l_bits: u64, budget: &LinkBudget, overhead_factor: f64) -> f64 {
    budget.tx_power_w * (l_bits as f64 / budget.data_rate_bps) * overhead_factor
}

/// Number of `l`-bit packets needed to carry `message_bits`.
pub fn packet_count(message_bits: u64, p: &ChannelParams) -> u64 {
    message_bits.max(1).div_ceil(p.l)
}

/// UTF-8 byte length times eight.
pub fn message_bits(text: &str) -> u64 {
    text.len() as u64 * 8
}

/// Probability that at least one of `packets` independent packets fails.
pub fn message_loss(p: &ChannelParams, packets: u64) -> f64 {
    let per_packet = channel_loss(p);
    if packets <= 1 || per_packet == 0.0 {
        return per_packet;
    }
    (-(packets as f64 * (-per_packet).ln_1p()).exp_m1()).clamp(0.0, 1.0)
}

/// Transmit energy for a whole message: packets times per-packet energy.
pub fn message_comm_energy(message_bits: u64, p: &ChannelParams, budget: &LinkBudget) -> f64 {
    packet_count(message_bits, p) as f64 * comm_energy(p.l, budget, budget.overhead_factor)
}
