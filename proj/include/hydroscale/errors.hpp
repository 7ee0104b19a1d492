#ifndef HYDROSCALE_ERRORS_HPP_
#define HYDROSCALE_ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hydroscale {

// Argument outside the mathematical domain of an operation (rho >= rho_c, d = 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A series or iteration did not settle within its budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A time stepper detected blow-up, NaN or a CFL violation.
class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The simulator hit its event cap; the configuration is left in its partial state.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, std::uint64_t events)
      : std::runtime_error(what), events_(events) {}
  std::uint64_t events() const { return events_; }

 private:
  std::uint64_t events_;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedFluxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hydroscale

#endif  // HYDROSCALE_ERRORS_HPP_
