use std::time::Instant;
use tasim_core::closed_form::Modulation;
use tasim_core::config::ChannelConfig;
use tasim_core::validate::{validate, Fault, ToleranceProfile};

fn desk() -> ChannelConfig {
    ChannelConfig::at_point(vec![2, 1, 3], vec![1.5, 2.0, 0.8], vec![1.0, 0.4, 2.5], 10.0).unwrap()
}

#[test]
fn desk_config_passes_every_check() {
    let r = validate(&desk(), &Modulation::bpsk(), &ToleranceProfile::default(), None).unwrap();
    println!("{r}");
    assert!(r.all_passed(), "{r}");
}

#[test]
fn flipped_kappa_sign_is_caught() {
    let r = validate(&desk(), &Modulation::bpsk(), &ToleranceProfile::default(), Some(Fault::KappaSign(0))).unwrap();
    assert!(!r.all_passed());
    let worst = r.worst().unwrap();
    assert!(!worst.passed(), "{worst:?}");
}

#[test]
fn single_link_is_quick() {
    let start = Instant::now();
    let cfg = ChannelConfig::at_point(vec![1], vec![1.0], vec![1.0], 0.0).unwrap();
    let r = validate(&cfg, &Modulation::parse("qam:16").unwrap(), &ToleranceProfile::default(), None).unwrap();
    assert!(r.all_passed(), "{r}");
    assert!(start.elapsed().as_secs_f64() < 5.0);
}
