#ifndef ERA_ERROR_HPP
#define ERA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace era {

enum class errc {
  invalid_symbol,
  duplicate_sentinel,
  out_of_range,
  unsorted_requests,
  budget_too_small,
  invalid_branch,
  inconsistent_occurrences,
  precondition,
  unsupported_format,
  corrupt_index,
  io_failure,
};

// Single exception type carrying a machine-checkable code. The CLI maps
// codes to exit codes; tests match on code rather than message text.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw error(code, what); }

}  // namespace era

#endif  // ERA_ERROR_HPP
