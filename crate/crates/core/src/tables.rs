//! Tabulated thresholds used for calibration and comparison output.

/// Loss rates at which the threshold columns are tabulated.
pub const LOSS_RATES: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.45];

/// Uncorrelated channel, single bond.
pub const SINGLE_COLUMN: [f64; 6] = [0.11003, 0.09240, 0.07245, 0.04984, 0.02462, 0.01155];
/// Uncorrelated channel, four-bond star.
pub const A_COLUMN: [f64; 6] = [0.10928, 0.09196, 0.07235, 0.05004, 0.02492, 0.01174];
/// Uncorrelated channel, larger cluster.
pub const B_COLUMN: [f64; 6] = [0.10918, 0.09189, 0.07233, 0.05009, 0.02500, 0.01179];
/// Depolarizing channel, single crossing slot.
pub const C_COLUMN: [f64; 6] = [0.18929, 0.16025, 0.12690, 0.08844, 0.04454, 0.02121];
pub const D_COLUMN: [f64; 6] = [0.18886, 0.15985, 0.12656, 0.08819, 0.04440, 0.02114];
pub const E_COLUMN: [f64; 6] = [0.18852, 0.15960, 0.12641, 0.08815, 0.04443, 0.02117];

/// Minimum-weight matching thresholds `p_c^0` (Stace & Barrett).
pub const MATCHING_P_C0: [f64; 6] = [0.10486, 0.08816, 0.06997, 0.04836, 0.02561, 0.00757];
/// Improved matching threshold at `q = 0`.
pub const MATCHING_IMPROVED_Q0: f64 = 0.1065;
/// Constructive decoder for the depolarizing channel at `q = 0`.
pub const DEPOLARIZING_DECODER_Q0: f64 = 0.164;

/// Index of `q` in [`LOSS_RATES`], matching within `1e-9`.
pub fn loss_rate_index(q: f64) -> Option<usize> {
    LOSS_RATES.iter().position(|&t| (t - q).abs() < 1e-9)
}
