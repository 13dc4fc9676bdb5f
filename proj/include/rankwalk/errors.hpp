#pragma once

#include <stdexcept>
#include <string>

namespace rankwalk {

// Process exit codes shared by the CLI and the test drivers.
enum class ExitCode : int {
  ok = 0,
  usage = 1,       // bad command line
  data = 2,        // unreadable or malformed input data
  structural = 3,  // violated invariant, refused computation, numerical failure
};

// Input files or rows that cannot be interpreted.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation that refuses to proceed: broken invariants, out-of-range
// problem sizes, non-convergence, cycles where an order was required.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rankwalk
