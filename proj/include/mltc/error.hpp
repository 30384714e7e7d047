#pragma once

#include <stdexcept>
#include <string>

namespace mltc {

/// Every recoverable failure in the toolkit (bad input, I/O, shape mismatch)
/// is reported with this exception type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mltc
