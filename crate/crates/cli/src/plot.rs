//! Gnuplot script for the spectrum figure.

use std::fmt::Write as _;

/// Where the script finds its data.
pub enum Data<'a> {
    /// A CSV file on disk, referenced by path.
    File(&'a str),
    /// CSV text embedded as a datablock, for when the table went to stdout.
    Inline(&'a str),
}

fn quote(path: &str) -> String {
    format!("'{}'", path.replace('\'', "''"))
}

/// Plots `dim` and the Eggleston bound `H(θ)` against θ (columns 1, 4, 5).
pub fn gnuplot_script(data: Data<'_>) -> String {
    let mut s = String::new();
    let source = match data {
        Data::File(path) => quote(path),
        Data::Inline(csv) => {
            s.push_str("$spectrum << EOD\n");
            s.push_str(csv);
            if !csv.ends_with('\n') {
                s.push('\n');
            }
            s.push_str("EOD\n\n");
            "$spectrum".to_string()
        }
    };
    let _ = write!(
        s,
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set key bottom center\n\
         set xlabel 'theta'\n\
         set ylabel 'Hausdorff dimension'\n\
         set xrange [0:1]\n\
         set yrange [0:1.05]\n\
         set grid\n\
         plot {source} using 1:4 with lines lw 2 title 'dim A_theta', \\\n     \
         {source} using 1:5 with lines dt 2 title 'H(theta)'\n"
    );
    s
}
