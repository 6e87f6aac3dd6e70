//! Protocol time accounting.

use crate::error::{Error, Result};

/// Durations of the elementary operations, in any consistent unit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeModel {
    pub tau_1bit: f64,
    pub tau_2bit: f64,
    pub tau_meas: f64,
}

impl TimeModel {
    pub fn new(tau_1bit: f64, tau_2bit: f64, tau_meas: f64) -> Result<Self> {
        for (name, v) in [
            ("tau_1bit", tau_1bit),
            ("tau_2bit", tau_2bit),
            ("tau_meas", tau_meas),
        ] {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    range: "(0, inf)",
                });
            }
        }
        Ok(TimeModel {
            tau_1bit,
            tau_2bit,
            tau_meas,
        })
    }

    /// Wall time of one parallel entanglement-swapping pass. Every layer of
    /// the swap circuit runs simultaneously across the bus, so this does not
    /// depend on the length.
    pub fn t_entswap(&self) -> f64 {
        4.0 * self.tau_1bit + 2.0 * self.tau_2bit + self.tau_meas
    }

    /// Wall time of moving a state across l positions by nearest-neighbor
    /// swap gates.
    pub fn t_swap(&self, l: usize) -> f64 {
        2.0 * l as f64 * self.tau_2bit
    }

    /// One purification round: local rotations, one entangling gate layer,
    /// one measurement layer.
    pub fn t_purify_round(&self) -> f64 {
        self.tau_1bit + self.tau_2bit + self.tau_meas
    }

    /// One joint Bell measurement when nesting: basis-change rotations, the
    /// joint entangling gate, the readout.
    pub fn t_joint(&self) -> f64 {
        2.0 * self.tau_1bit + self.tau_2bit + self.tau_meas
    }

    /// Smallest length at which serial swapping becomes slower than the
    /// parallel protocol.
    pub fn crossover_length(&self) -> usize {
        let l = self.t_entswap() / (2.0 * self.tau_2bit);
        l.ceil().max(1.0) as usize
    }
}

/// (t_entswap, t_swap) for a length-l connection.
pub fn protocol_times(l: usize, tm: &TimeModel) -> (f64, f64) {
    (tm.t_entswap(), tm.t_swap(l))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_times_give_seven() {
        let tm = TimeModel::new(1.0, 1.0, 1.0).unwrap();
        for l in [2, 4, 40, 400] {
            let (t_ent, _) = protocol_times(l, &tm);
            assert_eq!(t_ent, 7.0);
        }
    }

    #[test]
    fn swap_time_scales_linearly() {
        let tm = TimeModel::new(0.3, 1.0, 2.0).unwrap();
        let (_, t_swap) = protocol_times(10, &tm);
        assert_eq!(t_swap, 20.0);
    }

    #[test]
    fn entswap_time_is_length_independent() {
        let tm = TimeModel::new(0.7, 1.3, 0.9).unwrap();
        assert_eq!(protocol_times(4, &tm).0, protocol_times(400, &tm).0);
    }

    #[test]
    fn crossover_is_where_swap_overtakes() {
        let tm = TimeModel::new(1.0, 1.0, 1.0).unwrap();
        let l = tm.crossover_length();
        assert_eq!(l, 4); // 2*4 = 8 >= 7 > 2*3 = 6
        assert!(tm.t_swap(l) >= tm.t_entswap());
        assert!(tm.t_swap(l - 1) < tm.t_entswap());
    }

    #[test]
    fn rejects_nonpositive_durations() {
        assert!(TimeModel::new(0.0, 1.0, 1.0).is_err());
        assert!(TimeModel::new(1.0, -1.0, 1.0).is_err());
    }
}
