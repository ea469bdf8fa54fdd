#pragma once

#include <stdexcept>
#include <string>

namespace hfpquad {

enum class errc {
    order_too_large,
    unsupported_zeta_argument,
    invalid_argument,
    domain_error,
    missing_derivatives,
    unsupported_rule,
    evaluation_failed,
    reference_not_converged,
    odd_n_unsupported,
    missing_diagonal_derivatives,
    singular_system,
    insufficient_data,
    not_converged,
    io_error,
};

inline const char* to_string(errc code) noexcept
{
    switch (code) {
    case errc::order_too_large: return "order too large";
    case errc::unsupported_zeta_argument: return "unsupported zeta argument";
    case errc::invalid_argument: return "invalid argument";
    case errc::domain_error: return "domain error";
    case errc::missing_derivatives: return "missing derivatives";
    case errc::unsupported_rule: return "unsupported rule";
    case errc::evaluation_failed: return "evaluation failed";
    case errc::reference_not_converged: return "reference did not converge";
    case errc::odd_n_unsupported: return "odd n unsupported";
    case errc::missing_diagonal_derivatives: return "missing diagonal derivatives";
    case errc::singular_system: return "singular system";
    case errc::insufficient_data: return "insufficient pre-floor data";
    case errc::not_converged: return "not converged";
    case errc::io_error: return "i/o error";
    }
    return "unknown error";
}

/// Every failure raised by the library. The code lets callers and tests
/// distinguish failure kinds without parsing the message.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

/// Raised when a node evaluation of a user integrand fails.
class evaluation_error : public error {
public:
    evaluation_error(long long node_index, double x, const std::string& what)
        : error(errc::evaluation_failed, what), node_index_(node_index), x_(x) {}

    long long node_index() const noexcept { return node_index_; }
    double abscissa() const noexcept { return x_; }

private:
    long long node_index_;
    double x_;
};

/// Raised by dense solves whose matrix is singular to working precision.
class singular_system_error : public error {
public:
    singular_system_error(double condition_estimate, const std::string& what)
        : error(errc::singular_system, what), condition_(condition_estimate) {}

    double condition_estimate() const noexcept { return condition_; }

private:
    double condition_;
};

} // namespace hfpquad
