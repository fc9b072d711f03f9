#ifndef MLEANN_ERROR_HPP
#define MLEANN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mleann {

/// Violated precondition (dimension mismatch, invalid configuration, ...).
class contract_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite or otherwise unusable value.
class numeric_error : public std::runtime_error {
public:
  numeric_error(const std::string& what, std::size_t index)
      : std::runtime_error(what + " (index " + std::to_string(index) + ")"), index_(index) {}
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}

  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_ = 0;
};

/// Malformed or missing input data.
class data_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw contract_error(message);
}

}  // namespace mleann

#endif  // MLEANN_ERROR_HPP
