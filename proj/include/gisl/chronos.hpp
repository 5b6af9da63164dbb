#pragma once

namespace gisl {

// Expected cell count after time t when a fraction p of cells carries the perturbed growth rate.
double chronos_cell_count(double n0, double p, double r_star, double r, double t);

// Perturbation score trajectory; constant before the onset delay d.
double chronos_zscore(double v0, double p_c, double p_j, double r, double fitness, double t, double d);

}  // namespace gisl
