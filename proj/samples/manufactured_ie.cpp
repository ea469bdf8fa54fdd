// Second-kind equation with a cubic theta kernel, manufactured solution.
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hfpquad.hpp"

int main()
{
    using namespace hfpquad;
    const auto kernel = theta3_kernel(0.0, two_pi);
    auto exact = [](double x) { return poisson_u(0.3, x); };
    const auto w = manufactured_rhs(kernel, exact, 1.0);
    for (int n : {4, 8, 16}) {
        for (auto method : {approach::simple, approach::advanced}) {
            const auto sys = method == approach::simple ? build_simple_system(kernel, w, 1.0, n)
                                                        : build_advanced_system(kernel, w, 1.0, n);
            const auto sol = solve_collocation(sys);
            double err = 0.0;
            for (std::size_t i = 0; i < sol.grid.size(); ++i) {
                err = std::max(err, std::abs(sol.phi[i] - exact(sol.grid[i])));
            }
            std::printf("%-8s n = %2d  nodes = %3zu  max error = %.3e  cond = %.2e\n",
                        method == approach::simple ? "simple" : "advanced", n, sol.grid.size(), err,
                        sol.condition_estimate);
        }
    }
}
