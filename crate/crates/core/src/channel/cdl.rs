/// One cluster of a clustered-delay-line profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster {
    /// Delay in units of the RMS delay spread.
    pub normalized_delay: f64,
    pub power_db: f64,
}

const fn c(normalized_delay: f64, power_db: f64) -> Cluster {
    Cluster {
        normalized_delay,
        power_db,
    }
}

/// CDL-A clusters (TR 38.901).
pub const CDL_A: [Cluster; 23] = [
    c(0.0000, -13.4),
    c(0.3819, 0.0),
    c(0.4025, -2.2),
    c(0.5868, -4.0),
    c(0.4610, -6.0),
    c(0.5375, -8.2),
    c(0.6708, -9.9),
    c(0.5750, -10.5),
    c(0.7618, -7.5),
    c(1.5375, -15.9),
    c(1.8978, -6.6),
    c(2.2242, -16.7),
    c(2.1718, -12.4),
    c(2.4942, -15.2),
    c(2.5119, -10.8),
    c(3.0582, -11.3),
    c(4.0810, -12.7),
    c(4.4579, -16.2),
    c(4.5695, -18.3),
    c(4.7966, -18.9),
    c(5.0066, -16.6),
    c(5.3043, -19.9),
    c(9.6586, -29.7),
];

/// Linear powers scaled to unit sum.
pub fn normalized_powers(profile: &[Cluster]) -> Vec<f64> {
    let lin: Vec<f64> = profile.iter().map(|c| 10f64.powf(c.power_db / 10.0)).collect();
    let total: f64 = lin.iter().sum();
    lin.into_iter().map(|p| p / total).collect()
}
