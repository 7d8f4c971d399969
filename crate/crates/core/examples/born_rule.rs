//! Projective measurements on a single qubit.

use predictive_observer::qubit::{born_probability, collapse, repeat_measurement_check};
use predictive_observer::{Answer, Axis, BlochVector};

fn main() -> predictive_observer::Result<()> {
    let z = Axis::z();
    let x = Axis::x();
    let tilted = Axis::polar(std::f64::consts::FRAC_PI_3);

    println!("p(+z | mixed)      = {}", born_probability(&BlochVector::mixed(), &z));
    let up = collapse(&z, Answer::Plus);
    println!("p(+z | +z)         = {}", born_probability(&up, &z));
    println!("p(+x | +z)         = {}", born_probability(&up, &x));
    println!("p(+60deg | +z)     = {:.6}", born_probability(&up, &tilted));
    println!("repeat check on -x = {}", repeat_measurement_check(&x, Answer::Minus));

    let partial = BlochVector::new(0.0, 0.0, 0.6)?;
    println!("p(+z | r=0.6 z)    = {}", born_probability(&partial, &z));
    Ok(())
}
