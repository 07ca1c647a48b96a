use std::ffi::{c_char, CString};
use std::ptr;

use chaincarbon_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { cc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn fixture(name: &str) -> CString {
    CString::new(format!(
        "{}/../../fixtures/{name}",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap()
}

#[test]
fn pow_daily_energies() {
    let mut mwh = 0.0;
    unsafe {
        assert_eq!(
            cc_pow_lower_daily_energy(1000.0, 2.0, &mut mwh),
            CcStatus::Ok
        );
        assert!((mwh - 48.0).abs() < 1e-12);
        assert_eq!(
            cc_pow_upper_daily_energy(10.0, 0.0, 0.0, 0.0, 100.0, 0.1, &mut mwh),
            CcStatus::Ok
        );
        assert!((mwh - 10.0).abs() < 1e-12);
        assert_eq!(
            cc_pow_lower_daily_energy(1000.0, 0.0, &mut mwh),
            CcStatus::InvalidArgument
        );
        assert!(last_error().contains("efficiency"));
        assert_eq!(
            cc_pow_lower_daily_energy(1000.0, 2.0, ptr::null_mut()),
            CcStatus::NullPointer
        );
    }
}

#[test]
fn pos_reference_scenarios() {
    unsafe {
        let low = cc_pos_scenario_default(CcHardware::LowPower);
        let high = cc_pos_scenario_default(CcHardware::Server);
        let mut r = CcPosResult::default();
        assert_eq!(cc_pos_model(low, &mut r), CcStatus::Ok);
        assert_eq!(r.node_count.round(), 903_569.0);
        assert_eq!(r.validator_count, 3_438_467.687_5);
        assert_eq!(cc_pos_model(high, &mut r), CcStatus::Ok);
        assert_eq!(r.node_count.round(), 439_507.0);
        let mut closed = 0.0;
        assert_eq!(
            cc_pos_closed_form_node_count(high, &mut closed),
            CcStatus::Ok
        );
        assert!(((closed - r.node_count) / r.node_count).abs() < 1e-12);
        cc_pos_scenario_free(low);
        cc_pos_scenario_free(high);
        cc_pos_scenario_free(ptr::null_mut());
    }
}

#[test]
fn pos_zero_price() {
    unsafe {
        let s = cc_pos_scenario_default(CcHardware::LowPower);
        let mut p = CcPosParams::default();
        assert_eq!(cc_pos_scenario_params(s, &mut p), CcStatus::Ok);
        p.token_price = 0.0;
        assert_eq!(cc_pos_scenario_set_params(s, &p), CcStatus::Ok);
        let mut r = CcPosResult::default();
        assert_eq!(cc_pos_model(s, &mut r), CcStatus::ZeroReturn);
        p.total_stake = -1.0;
        assert_eq!(cc_pos_scenario_set_params(s, &p), CcStatus::InvalidArgument);
        cc_pos_scenario_free(s);
    }
}

#[test]
fn custom_scenario_and_equilibrium() {
    unsafe {
        let mut p = CcPosParams::default();
        assert_eq!(cc_pos_params_default(&mut p), CcStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(cc_pos_scenario_new(&p, 5.0, 490.64, &mut s), CcStatus::Ok);
        let mut o = CcSimOutcome::default();
        assert_eq!(cc_equilibrium_simulate(s, 3, 0, 0, &mut o), CcStatus::Ok);
        assert_eq!(o.node_count, 903_569);
        assert!(o.converged);
        assert_eq!(
            cc_equilibrium_simulate(s, 3, 100, 1, &mut o),
            CcStatus::NonConvergence
        );
        cc_pos_scenario_free(s);

        let mut bad = ptr::null_mut();
        assert_eq!(
            cc_pos_scenario_new(&p, -5.0, 490.64, &mut bad),
            CcStatus::InvalidArgument
        );
        assert!(bad.is_null());
    }
}

#[test]
fn country_table() {
    unsafe {
        let mut t = ptr::null_mut();
        let path = fixture("country_profiles_pos.csv");
        assert_eq!(cc_country_table_load(path.as_ptr(), &mut t), CcStatus::Ok);
        assert_eq!(cc_country_table_len(t), 1);
        let mut w = CcWeightedFactors::default();
        assert_eq!(cc_country_table_weighted(t, &mut w), CcStatus::Ok);
        assert_eq!(w.emission_factor_kgco2_per_kwh, 0.4323);
        cc_country_table_free(t);

        let missing = CString::new("/nonexistent/table.csv").unwrap();
        assert_eq!(
            cc_country_table_load(missing.as_ptr(), &mut t),
            CcStatus::Io
        );
        assert!(last_error().contains("/nonexistent/table.csv"));
    }
}

#[test]
fn logistic_fit_and_projection() {
    unsafe {
        let params = cc_logistic_bitcoin_default();
        let years: Vec<i32> = (2009..=2020).collect();
        let tx: Vec<f64> = years
            .iter()
            .map(|&y| {
                let mut v = 0.0;
                assert_eq!(
                    cc_logistic_value(&params, f64::from(y - 2009), &mut v),
                    CcStatus::Ok
                );
                v
            })
            .collect();
        let mut fit = CcLogisticFit::default();
        assert_eq!(
            cc_fit_logistic(years.as_ptr(), tx.as_ptr(), years.len(), params.k, &mut fit),
            CcStatus::Ok
        );
        assert!(((fit.params.r0 - 0.219) / 0.219).abs() < 1e-6);
        assert!(((fit.params.p0 - params.p0) / params.p0).abs() < 1e-6);
        assert_eq!(
            cc_fit_logistic(years.as_ptr(), tx.as_ptr(), 2, params.k, &mut fit),
            CcStatus::InsufficientData
        );

        let mut traj = ptr::null_mut();
        assert_eq!(
            cc_project_logistic(43.76, 112_559_843.0, &params, 2020, 100, &mut traj),
            CcStatus::Ok
        );
        assert_eq!(cc_trajectory_len(traj), 100);
        assert_eq!(cc_trajectory_start_year(traj), 2020);
        let mut annual = vec![0.0; 100];
        assert_eq!(
            cc_trajectory_annual(traj, annual.as_mut_ptr(), 100),
            CcStatus::Ok
        );
        assert!(annual.windows(2).all(|w| w[1] >= w[0]));
        let mut short = vec![0.0; 10];
        assert_eq!(
            cc_trajectory_cumulative(traj, short.as_mut_ptr(), 10),
            CcStatus::InvalidArgument
        );
        let (mut found, mut year) = (false, 0);
        assert_eq!(
            cc_trajectory_crossing_year(traj, 4.5e-4, 1.5, &mut found, &mut year),
            CcStatus::Ok
        );
        assert!(found);
        assert!((2065..=2075).contains(&year));
        cc_trajectory_free(traj);
    }
}

#[test]
fn adoption_projection() {
    unsafe {
        let path = fixture("adoption_curves.csv");
        let mut traj = ptr::null_mut();
        assert_eq!(
            cc_project_adoption(
                path.as_ptr(),
                0.5,
                5,
                0.1348,
                0.000564076,
                2020,
                100,
                &mut traj
            ),
            CcStatus::Ok
        );
        let mut cumulative = vec![0.0; 100];
        assert_eq!(
            cc_trajectory_cumulative(traj, cumulative.as_mut_ptr(), 100),
            CcStatus::Ok
        );
        assert!((cumulative[99] - 17.0).abs() / 17.0 < 0.05);
        cc_trajectory_free(traj);
        assert_eq!(
            cc_project_adoption(path.as_ptr(), 1.5, 5, 0.1348, 0.5, 2020, 100, &mut traj),
            CcStatus::InvalidArgument
        );
    }
}
