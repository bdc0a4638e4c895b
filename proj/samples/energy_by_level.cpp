// Prints how much of a field's energy each refinement level recovers on the
// L-shaped domain, together with the L2 approximation error.

#include <cmath>
#include <cstdio>

#include "vgrt/vgrt.hpp"

int main() {
    using namespace vgrt;
    const Region domain(make_polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}));
    RefinementParams params;
    params.multiplicity = 5;
    params.dispersion = 0.5;
    params.base_angle = 0.3;
    params.max_depth = 4;
    const RefinementTree tree = refine(domain, params);

    const Field field = AnalyticField::gaussian_bump({0.6, 0.6}, 0.3);
    const CoefficientSet coeffs = forward(tree, field);
    const double norm_sq = l2_norm_sq(field, domain, {});

    std::printf("level  cells  ||f_m||^2/||f||^2  ||f - f_m||\n");
    for (int m = 0; m <= tree.depth(); ++m)
        std::printf("%5d %6zu  %.10f  %.3e\n", m, tree.levels[static_cast<std::size_t>(m)].size(),
                    partial_norm_sq(coeffs, m) / norm_sq, std::sqrt(approximation_error_sq(tree, coeffs, field, m)));
}
