//! Fixed-product combustion: no equilibrium chemistry, one pseudo-gas per
//! propellant pair and a constant heat of combustion on the fuel.

use super::{gas_props, FluidDatabase, FluidError, GasProperties, Mixture};

#[derive(Debug, Clone, PartialEq)]
pub struct CombustionResult {
    pub products: Mixture,
    pub gas: GasProperties,
    /// Combustion temperature, K.
    pub tc: f64,
}

/// Energy balance Tc = T_in + η·q·f/cp, where `fuel_fraction` f = 1/(1+O/F)
/// and T_in is the mass-weighted inlet temperature.
pub fn flame_temperature(
    fuel_fraction: f64,
    t_fuel: f64,
    t_ox: f64,
    heat_of_combustion: f64,
    eta_comb: f64,
    cp_products: f64,
) -> f64 {
    let t_in = fuel_fraction * t_fuel + (1.0 - fuel_fraction) * t_ox;
    t_in + eta_comb * heat_of_combustion * fuel_fraction / cp_products
}

/// Products and combustion temperature for a propellant pair at mixture ratio
/// `of_ratio` (may be `f64::INFINITY` for a pure-oxidizer stream).
pub fn combustion(
    db: &FluidDatabase,
    fuel: &Mixture,
    oxidizer: &Mixture,
    of_ratio: f64,
    t_fuel: f64,
    t_ox: f64,
    eta_comb: f64,
) -> Result<CombustionResult, FluidError> {
    if !(of_ratio >= 0.0) {
        return Err(FluidError::InvalidCombustionInput(format!("O/F ratio {of_ratio} is negative")));
    }
    if !(eta_comb > 0.0 && eta_comb <= 1.0) {
        return Err(FluidError::InvalidCombustionInput(format!(
            "combustion efficiency {eta_comb} outside (0, 1]"
        )));
    }
    let products = Mixture::pure(db.products_for(fuel, oxidizer)?);
    let gas = gas_props(&products)?;
    let fuel_fraction = if of_ratio.is_infinite() { 0.0 } else { 1.0 / (1.0 + of_ratio) };
    let tc = flame_temperature(
        fuel_fraction,
        t_fuel,
        t_ox,
        fuel.heat_of_combustion(),
        eta_comb,
        gas.cp,
    );
    Ok(CombustionResult { products, gas, tc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hand_energy_balance() {
        // 200 + 1e7/(5·2000)
        let tc = flame_temperature(1.0 / 5.0, 200.0, 200.0, 1e7, 1.0, 2000.0);
        assert_relative_eq!(tc, 1200.0, epsilon = 1e-9);
    }

    #[test]
    fn pure_oxidizer_limit_releases_no_heat() {
        let db = FluidDatabase::builtin();
        let fuel = Mixture::pure(db.species("LH2").unwrap());
        let ox = Mixture::pure(db.species("LOX").unwrap());
        let r = combustion(&db, &fuel, &ox, f64::INFINITY, 20.0, 90.0, 1.0).unwrap();
        assert_relative_eq!(r.tc, 90.0, epsilon = 1e-12);
        let big = combustion(&db, &fuel, &ox, 1e9, 20.0, 90.0, 1.0).unwrap();
        assert!((big.tc - 90.0).abs() < 1e-3);
    }

    #[test]
    fn tc_decreases_with_mixture_ratio() {
        let db = FluidDatabase::builtin();
        let fuel = Mixture::pure(db.species("RP1").unwrap());
        let ox = Mixture::pure(db.species("LOX").unwrap());
        let temps: Vec<f64> = (1..60)
            .map(|i| 0.1 * i as f64)
            .map(|of| combustion(&db, &fuel, &ox, of, 290.0, 90.0, 0.9).unwrap().tc)
            .collect();
        assert!(temps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn unknown_pair_and_bad_inputs() {
        let db = FluidDatabase::builtin();
        let water = Mixture::pure(db.species("WATER").unwrap());
        let ox = Mixture::pure(db.species("LOX").unwrap());
        assert!(matches!(
            combustion(&db, &water, &ox, 2.0, 300.0, 90.0, 1.0),
            Err(FluidError::UnknownPropellantPair { .. })
        ));
        let fuel = Mixture::pure(db.species("LH2").unwrap());
        assert!(combustion(&db, &fuel, &ox, -1.0, 20.0, 90.0, 1.0).is_err());
        assert!(combustion(&db, &fuel, &ox, 5.0, 20.0, 90.0, 0.0).is_err());
        assert!(combustion(&db, &fuel, &ox, 5.0, 20.0, 90.0, 1.2).is_err());
    }
}
