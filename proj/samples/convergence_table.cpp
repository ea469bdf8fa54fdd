// Errors of the s = 0, 1, 2 rules for the eta family at t = 1.
#include <cstdio>

#include "hfpquad.hpp"

int main()
{
    using namespace hfpquad;
    for (int s = 0; s <= 2; ++s) {
        ConvergenceCase c;
        c.s = s;
        c.eta = 0.5;
        auto r = convergence_table(c, {10, 20, 30, 40, 50, 60});
        std::printf("s = %d\n", s);
        for (const auto& row : r.rows) {
            std::printf("  n = %3d  error = %.3e  floor = %.3e\n", row.n, row.error, row.floor);
        }
        const auto fit = empirical_rate(r);
        std::printf("  slope %.4f over %d rows\n", fit.slope, fit.rows_used);
    }
}
