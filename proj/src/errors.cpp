#include "ictmc/errors.hpp"

#include <sstream>

namespace ictmc {

std::string Violation::describe() const {
    std::ostringstream os;
    os << rule << " violated at row " << row;
    if (col) os << ", column " << *col;
    os << " (residual " << residual << ")";
    return os.str();
}

std::string ValidationReport::describe() const {
    if (ok()) return "ok";
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i].describe();
    }
    return os.str();
}

ValidationError::ValidationError(ValidationReport report, std::string context)
    : Error((context.empty() ? std::string() : context + ": ") + "validation failed: " + report.describe()),
      report_(std::move(report)), context_(std::move(context)) {}

StepBudgetExceeded::StepBudgetExceeded(double required, std::uint64_t cap)
    : Error([&] {
          std::ostringstream os;
          os.precision(17);
          os << "required step count " << required << " exceeds the cap of " << cap;
          return os.str();
      }()),
      required_(required), cap_(cap) {}

} // namespace ictmc
