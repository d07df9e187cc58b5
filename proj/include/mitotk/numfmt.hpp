#pragma once

#include <string>

namespace mitotk {

// Shortest decimal string that round-trips to the same double.
std::string format_full(double x);

// Fixed-point rendering with decimal half-away-from-zero rounding applied to
// the exact decimal expansion of the double (so 0.8585000...04 -> "0.859" and
// 0.9444999...69 -> "0.944"; no binary re-rounding artifacts). places in [0, 20].
std::string format_fixed(double x, int places);

// One-decimal percent cell, e.g. 0.156123 -> "15.6".
std::string format_pct1(double fraction);

// Balanced-accuracy cell for rendered metric tables. The cell is recomputed
// from the two rate cells as they appear in print (3 decimals), averaged in
// single precision, then rendered at 3 decimals, so the printed table stays
// internally consistent: ba = render3(float(round3(sens) + round3(spec)) / 2).
std::string format_ba_cell(double sensitivity, double specificity);

} // namespace mitotk
