#include "sigcpd/error.hpp"

namespace sigcpd {
namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::string msg = "invalid parameters:";
  for (const auto& v : violations) msg += "\n  - " + v;
  return msg;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

CsvError::CsvError(std::size_t line, const std::string& message)
    : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

}  // namespace sigcpd
