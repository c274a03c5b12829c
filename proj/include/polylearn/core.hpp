#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace polylearn {

using Vertex = std::size_t;
using Symbol = std::uint16_t;
using VarList = std::vector<Vertex>;

/// Largest dense probability table any exact computation may allocate.
inline constexpr std::size_t kDenseTableBudget = std::size_t{1} << 24;

/// All information quantities are reported in bits.
inline constexpr const char* kLogBase = "log2";

inline constexpr const char* kLibraryVersion = "1.0.0";

/// Raised when an exact computation would need a table beyond kDenseTableBudget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::string what, double required_entries)
      : std::runtime_error(what + ": requires " + format_entries(required_entries) +
                           " table entries, budget is " + std::to_string(kDenseTableBudget)),
        required_(required_entries) {}

  double required_entries() const noexcept { return required_; }

 private:
  static std::string format_entries(double n);
  double required_;
};

/// Raised by the orientation bookkeeping when an edge cannot be oriented.
class OrientationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace polylearn
