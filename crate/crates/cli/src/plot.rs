//! gnuplot script for the position, wheel speed and wheel angle figures.

/// Script reading `trajectory.csv` from its own directory.
pub fn figures_script() -> String {
    let rpm = "60.0/(2*pi)";
    format!(
        r#"# Render with: gnuplot figures.plot
set datafile separator ","
set key autotitle columnhead
set terminal pngcairo size 900,600
set grid
set xlabel "time (s)"

set output "position.png"
set title "Excavator position"
set ylabel "position (m)"
plot "trajectory.csv" using 1:2 with lines title "x", \
     "" using 1:3 with lines title "y"

set output "wheel_speed.png"
set title "Wheel speeds"
set ylabel "speed (RPM)"
plot "trajectory.csv" using 1:($7*{rpm}) with lines title "wheel 1", \
     "" using 1:($9*{rpm}) with lines title "wheel 2"

set output "wheel_angle.png"
set title "Wheel angles"
set ylabel "angle (rad)"
plot "trajectory.csv" using 1:6 with lines title "wheel 1", \
     "" using 1:8 with lines title "wheel 2"
"#
    )
}
